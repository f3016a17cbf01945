#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cfair/error.hpp"
#include "cfair/model.hpp"

namespace cfair {

enum class RuleId { c_weakening, i_cut, tri_cut, v_cut, generic_cut, intervention_axiom };

/// Stable names used in proof files: "c_weakening", "i_cut", ...
std::string_view rule_name(RuleId rule) noexcept;
std::optional<RuleId> parse_rule_name(std::string_view name) noexcept;

/// Side condition or structural requirement a rule application can violate.
enum class Violation {
  intervention_present,   // C-Weakening on a hypersequent
  no_intervention,        // cut rule without [graph, sigma] I(a=alpha)
  attribution_absent,     // erased attribution not in context
  value_mismatch,         // loose a_j attribution differs from the imposed value
  condition_star,         // Tri-Cut on an edge entering a_j
  edge_absent,            // erased edge not in context
  edge_not_factual,       // strict mode: erased edge not in the factual graph
  condition_double_star,  // V-Cut on an effect of a_j
  not_in_factual,         // V-Cut attribution not in the factual data point
  certainty_required,     // generic Cut with a left premise below probability 1
  ill_formed,             // the rule output would break a judgment invariant
  item_mismatch,          // recorded item disagrees with what the rule erases/adds
  premise_order,          // premise is not an assumption or earlier step
  premise_arity,          // wrong number of premises for the rule
  conclusion_mismatch,    // replay yields a different conclusion
};

/// Human label, e.g. "condition (*)" or "premise order".
std::string_view violation_label(Violation v) noexcept;

class RuleViolation : public Error {
 public:
  RuleViolation(Violation code, const std::string& detail);
  Violation code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Violation code_;
  std::string detail_;
};

/// Strict Tri-Cut additionally requires the erased edge to belong to the
/// bracketed factual graph; lenient follows the bare rule.
enum class EdgeMode { strict, lenient };

struct KernelOptions {
  EdgeMode edges = EdgeMode::strict;
};

// Rules. Each returns the conclusion or throws RuleViolation.

/// Adds [graph, sigma] I(a=alpha) to a context that has none.
Judgment apply_c_weakening(const Judgment& j, const InterventionExpr& e);

/// Erases the loose attribution a_j = alpha imposed by the intervention.
Judgment apply_i_cut(const Judgment& j);

/// Erases an edge a_i -> a_k with a_k != a_j.
Judgment apply_tri_cut(const Judgment& j, const Edge& edge, EdgeMode mode = EdgeMode::strict);

/// Erases an attribution taken verbatim from the factual data point whose
/// variable is not an effect of a_j in the factual graph.
Judgment apply_v_cut(const Judgment& j, const Attribution& attr);

/// [graph, sigma] I(a=alpha) |- a = alpha @ 1
Judgment intervention_axiom(const InterventionExpr& e);

/// Cut against a certainty: left concludes a = alpha @ 1, right holds a = alpha
/// in its context. Result: left context + right context minus a = alpha,
/// with right's conclusion.
Judgment generic_cut(const Judgment& left, const Judgment& right);

struct ProofStep {
  RuleId rule;
  ContextItem item;                    ///< erased, added, or cut formula
  std::vector<std::size_t> premises;   ///< assumptions first, then steps
  Judgment conclusion;
};

/// Proof object. Premise index i < assumptions.size() refers to an
/// assumption; otherwise to steps[i - assumptions.size()].
struct Proof {
  std::vector<Judgment> assumptions;
  std::vector<ProofStep> steps;

  std::size_t add_assumption(Judgment j);
  /// Appends a step and returns the index its conclusion can be cited by.
  std::size_t add_step(RuleId rule, ContextItem item, std::vector<std::size_t> premises, Judgment conclusion);

  /// Judgment referenced by a premise index.
  const Judgment& at(std::size_t index) const;
  /// Last step's conclusion, or the last assumption for a proof without steps.
  const Judgment& conclusion() const;

  std::size_t count(RuleId rule) const;
};

struct ProofFailure {
  std::size_t step;  ///< index into Proof::steps
  Violation reason;
  std::string detail;

  /// "<label> at step <k>: <detail>"
  std::string to_string() const;
};

/// Re-applies one step to its premises and returns the rule's output.
/// Throws RuleViolation.
Judgment replay_step(const Proof& proof, std::size_t step, const KernelOptions& options = {});

/// nullopt iff every step replays exactly; otherwise the first failing step.
std::optional<ProofFailure> check_proof(const Proof& proof, const KernelOptions& options = {});

}  // namespace cfair
