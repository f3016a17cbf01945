#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cfair/case.hpp"
#include "cfair/error.hpp"
#include "cfair/model.hpp"

namespace cfair::dsl {

/// 1-based line/column of the offending text, its length in bytes and the
/// 0-based byte offset of its first character.
struct SourceSpan {
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t length = 0;
  std::size_t offset = 0;
};

class ParseError : public Error {
 public:
  ParseError(SourceSpan span, std::string expected, std::string found);
  /// Semantic error (cycle, duplicate variable, unknown node, ...).
  ParseError(SourceSpan span, std::string message);

  const SourceSpan& span() const noexcept { return span_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& found() const noexcept { return found_; }

 private:
  SourceSpan span_;
  std::string expected_;
  std::string found_;
};

/// Case file (`.cfc`):
///
///   graph { G -> MS; SAT; ... }       edges, or bare isolated nodes
///   factual { MS = mar; Etn = !white; ... }
///   intervene MS = div;
///   target Loan = yes;
///   candidate { ... }                 optional
///   factual_prob 0.60;                optional
///
/// `#` starts a comment running to end of line.
Case parse_case(std::string_view text);

/// Either a bare `graph { ... }` block or a whole case file.
CausalGraph parse_graph(std::string_view text);

ValueTerm parse_value_term(std::string_view text);
ContextItem parse_context_item(std::string_view text);

/// `[A -> B, A = x] I(A=y), A = y, A -> B |- T = yes @ 0.60`
Judgment parse_judgment(std::string_view text);

/// One `judgment ;` per entry.
std::vector<Judgment> parse_judgment_db(std::string_view text);

/// Probability in judgment position: a decimal literal or `n/d`.
Probability parse_probability(std::string_view text);

std::string render_attribution(const Attribution& a);
std::string render_intervention_expr(const InterventionExpr& e);
std::string render_item(const ContextItem& item);

/// Canonical: intervention expression first, then edges in lexicographic
/// order, then attributions in stored order.
std::string render_judgment(const Judgment& j);

std::string render_graph(const CausalGraph& g);
std::string render_case(const Case& c);

}  // namespace cfair::dsl
