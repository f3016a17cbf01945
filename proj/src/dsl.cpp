#include "cfair/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <utility>

#include "cfair/closure.hpp"

namespace cfair::dsl {
namespace {

std::string format_error(const SourceSpan& span, const std::string& expected, const std::string& found) {
  std::string where = "line " + std::to_string(span.line) + ", column " + std::to_string(span.column) + ": ";
  if (expected.empty()) return where + found;
  return where + "expected " + expected + ", found " + found;
}

enum class Tok { ident, arrow, turnstile, lbrace, rbrace, lbracket, rbracket, lparen, rparen, semi, comma, eq, plus, bang, at, slash, end };

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::arrow: return "'->'";
    case Tok::turnstile: return "'|-'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::semi: return "';'";
    case Tok::comma: return "','";
    case Tok::eq: return "'='";
    case Tok::plus: return "'+'";
    case Tok::bang: return "'!'";
    case Tok::at: return "'@'";
    case Tok::slash: return "'/'";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto span_at = [&](std::size_t len) { return SourceSpan{line, col, len, i}; };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (ident_char(c)) {
      std::size_t len = 0;
      while (i + len < src.size() && ident_char(src[i + len])) ++len;
      out.push_back({Tok::ident, std::string(src.substr(i, len)), span_at(len)});
      advance(len);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "->" || two == "|-") {
      out.push_back({two == "->" ? Tok::arrow : Tok::turnstile, std::string(two), span_at(2)});
      advance(2);
      continue;
    }
    std::optional<Tok> single;
    switch (c) {
      case '{': single = Tok::lbrace; break;
      case '}': single = Tok::rbrace; break;
      case '[': single = Tok::lbracket; break;
      case ']': single = Tok::rbracket; break;
      case '(': single = Tok::lparen; break;
      case ')': single = Tok::rparen; break;
      case ';': single = Tok::semi; break;
      case ',': single = Tok::comma; break;
      case '=': single = Tok::eq; break;
      case '+': single = Tok::plus; break;
      case '!': single = Tok::bang; break;
      case '@': single = Tok::at; break;
      case '/': single = Tok::slash; break;
      default: break;
    }
    if (!single) throw ParseError(span_at(1), "a token", "unexpected character '" + std::string(1, c) + "'");
    out.push_back({*single, std::string(1, c), span_at(1)});
    advance(1);
  }
  // End-of-input points at the last character so spans stay inside the text.
  SourceSpan end{line, col, 0, src.size()};
  if (!src.empty()) {
    end = out.empty() ? SourceSpan{1, 1, 0, 0} : out.back().span;
    end.length = 0;
    end.offset = std::min(end.offset, src.size() - 1);
  }
  out.push_back({Tok::end, "", end});
  return out;
}

SourceSpan merge(const SourceSpan& a, const SourceSpan& b) {
  SourceSpan s = a;
  if (b.line == a.line && b.offset + b.length >= a.offset) s.length = b.offset + b.length - a.offset;
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(lex(src)) {}

  const Token& peek(std::size_t ahead = 0) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::ident) && peek().text == kw; }

  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void fail(std::string expected) const {
    const auto& t = peek();
    std::string found = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw ParseError(t.span, std::move(expected), std::move(found));
  }

  const Token& expect(Tok k) {
    if (!at(k)) fail(std::string(describe(k)));
    return next();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail("'" + std::string(kw) + "'");
    next();
  }

  void expect_end() {
    if (!at(Tok::end)) fail("end of input");
  }

  VariableId variable(SourceSpan* where = nullptr) {
    const auto& t = expect(Tok::ident);
    if (where) *where = t.span;
    return VariableId{t.text};
  }

  // valueterm := term { "+" term }
  ValueTerm value_term(SourceSpan* where = nullptr) {
    SourceSpan start = peek().span;
    std::vector<std::pair<ValueTerm, SourceSpan>> members;
    members.push_back({term(), start});
    while (at(Tok::plus)) {
      next();
      SourceSpan s = peek().span;
      members.push_back({term(), s});
    }
    if (where) *where = merge(start, tokens_[pos_ - 1].span);
    if (members.size() == 1) return members.front().first;
    std::vector<ValueTerm> terms;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t k = 0; k < i; ++k)
        if (members[k].first == members[i].first)
          throw ParseError(members[i].second, "duplicate sum member '" + members[i].first.to_string() + "'");
      terms.push_back(members[i].first);
    }
    return ValueTerm::sum(std::move(terms));
  }

  // term := ident | "!" term | "(" valueterm ")"
  ValueTerm term() {
    if (at(Tok::bang)) {
      next();
      return ValueTerm::complement(term());
    }
    if (at(Tok::lparen)) {
      next();
      auto inner = value_term();
      expect(Tok::rparen);
      return inner;
    }
    if (!at(Tok::ident)) fail("value term");
    return ValueTerm::atom(next().text);
  }

  Attribution attribution(SourceSpan* where = nullptr) {
    SourceSpan var_span;
    auto var = variable(&var_span);
    expect(Tok::eq);
    auto value = value_term();
    if (where) *where = var_span;
    return {std::move(var), std::move(value)};
  }

  // decimal | int "/" int
  Probability probability() {
    const auto& t = expect(Tok::ident);
    try {
      if (at(Tok::slash)) {
        next();
        const auto& d = expect(Tok::ident);
        auto num = parse_int(t);
        auto den = parse_int(d);
        if (den == 0) throw ParseError(d.span, "zero denominator");
        return Probability::ratio(num, den);
      }
      return Probability::parse_decimal(t.text);
    } catch (const ModelError& ex) {
      throw ParseError(t.span, ex.what());
    }
  }

  Probability decimal() {
    const auto& t = expect(Tok::ident);
    try {
      return Probability::parse_decimal(t.text);
    } catch (const ModelError& ex) {
      throw ParseError(t.span, ex.what());
    }
  }

  static std::int64_t parse_int(const Token& t) {
    if (t.text.empty() || t.text.size() > 12 ||
        !std::all_of(t.text.begin(), t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError(t.span, "integer", "'" + t.text + "'");
    return std::stoll(t.text);
  }

  // Graph block body; edges checked for cycles as they are added so the
  // error points at the edge that closes the cycle.
  CausalGraph graph_block() {
    expect_keyword("graph");
    expect(Tok::lbrace);
    VariableSet nodes;
    EdgeSet edges;
    while (!at(Tok::rbrace)) {
      SourceSpan from_span;
      auto from = variable(&from_span);
      if (at(Tok::arrow)) {
        next();
        auto to = variable();
        SourceSpan edge_span = merge(from_span, tokens_[pos_ - 1].span);
        Edge e{from, to};
        nodes.insert(from);
        nodes.insert(to);
        edges.insert(e);
        if (from == to) throw ParseError(edge_span, "cycle: " + from.name() + ", " + to.name());
        if (auto cycle = check_acyclic(nodes, edges)) throw ParseError(edge_span, CycleError(*cycle).what());
      } else {
        nodes.insert(from);
      }
      expect(Tok::semi);
    }
    expect(Tok::rbrace);
    return CausalGraph{std::move(nodes), std::move(edges)};
  }

  DataPoint attr_block(std::string_view keyword, const CausalGraph& g) {
    expect_keyword(keyword);
    expect(Tok::lbrace);
    std::vector<Attribution> attrs;
    while (!at(Tok::rbrace)) {
      SourceSpan span;
      auto a = attribution(&span);
      expect(Tok::semi);
      if (!g.has_node(a.var)) throw ParseError(span, "unknown node '" + a.var.name() + "'");
      for (const auto& prev : attrs)
        if (prev.var == a.var) throw ParseError(span, "duplicate variable '" + a.var.name() + "'");
      attrs.push_back(std::move(a));
    }
    expect(Tok::rbrace);
    return DataPoint{std::move(attrs)};
  }

  Case parse_case() {
    auto graph = graph_block();
    auto factual = attr_block("factual", graph);

    expect_keyword("intervene");
    SourceSpan iv_span;
    auto iv_var = variable(&iv_span);
    expect(Tok::eq);
    auto iv_value = ValueTerm::atom(expect(Tok::ident).text);
    expect(Tok::semi);
    if (!graph.has_node(iv_var)) throw ParseError(iv_span, "unknown node '" + iv_var.name() + "'");

    expect_keyword("target");
    SourceSpan target_span;
    auto target = variable(&target_span);
    expect(Tok::eq);
    auto target_value = value_term();
    expect(Tok::semi);
    if (!graph.has_node(target)) throw ParseError(target_span, "unknown node '" + target.name() + "'");
    if (target == iv_var) throw ParseError(target_span, "target coincides with the intervention variable");
    if (factual.find(target) != nullptr)
      throw ParseError(target_span, "target '" + target.name() + "' is assigned in the factual block");

    std::optional<DataPoint> candidate;
    if (at_keyword("candidate")) {
      candidate = attr_block("candidate", graph);
      if (candidate->find(target) != nullptr)
        throw ParseError(target_span, "target '" + target.name() + "' is assigned in the candidate block");
    }

    std::optional<Probability> prob;
    if (at_keyword("factual_prob")) {
      next();
      prob = decimal();
      expect(Tok::semi);
    }
    expect_end();
    return Case{std::move(graph), std::move(factual), prob, Intervention{std::move(iv_var), std::move(iv_value)},
                std::move(target), std::move(target_value), std::move(candidate)};
  }

  // "[" bitems "]" "I" "(" ident "=" ident ")"
  InterventionExpr intervention_expr() {
    SourceSpan open = expect(Tok::lbracket).span;
    VariableSet nodes;
    EdgeSet edges;
    std::vector<Attribution> attrs;
    std::vector<SourceSpan> attr_spans;
    if (!at(Tok::rbracket)) {
      do {
        SourceSpan s;
        auto v = variable(&s);
        if (at(Tok::arrow)) {
          next();
          auto to = variable();
          nodes.insert(v);
          nodes.insert(to);
          edges.insert({v, to});
        } else if (at(Tok::eq)) {
          next();
          auto value = value_term();
          for (const auto& prev : attrs)
            if (prev.var == v) throw ParseError(s, "duplicate variable '" + v.name() + "'");
          attrs.push_back({v, std::move(value)});
          attr_spans.push_back(s);
        } else {
          nodes.insert(v);
        }
      } while (at(Tok::comma) && (next(), true));
    }
    SourceSpan close = expect(Tok::rbracket).span;
    if (!(at_keyword("I"))) fail("'I'");
    next();
    expect(Tok::lparen);
    SourceSpan iv_span;
    auto iv_var = variable(&iv_span);
    expect(Tok::eq);
    auto iv_value = ValueTerm::atom(expect(Tok::ident).text);
    expect(Tok::rparen);

    CausalGraph graph;
    try {
      graph = CausalGraph{nodes, edges};
    } catch (const ModelError& ex) {
      throw ParseError(merge(open, close), ex.what());
    }
    if (!graph.has_node(iv_var)) throw ParseError(iv_span, "unknown node '" + iv_var.name() + "'");
    for (std::size_t i = 0; i < attrs.size(); ++i)
      if (!graph.has_node(attrs[i].var)) throw ParseError(attr_spans[i], "unknown node '" + attrs[i].var.name() + "'");
    return InterventionExpr{std::move(graph), DataPoint{std::move(attrs)},
                            Intervention{std::move(iv_var), std::move(iv_value)}};
  }

  ContextItem item() {
    if (at(Tok::lbracket)) return intervention_expr();
    auto from = variable();
    if (at(Tok::arrow)) {
      next();
      return Edge{std::move(from), variable()};
    }
    expect(Tok::eq);
    return Attribution{std::move(from), value_term()};
  }

  Judgment judgment() {
    SourceSpan start = peek().span;
    std::vector<ContextItem> ctx;
    if (!at(Tok::turnstile)) {
      ctx.push_back(item());
      while (at(Tok::comma)) {
        next();
        ctx.push_back(item());
      }
    }
    expect(Tok::turnstile);
    auto target = variable();
    expect(Tok::eq);
    auto value = value_term();
    expect(Tok::at);
    auto prob = probability();
    try {
      return Judgment{std::move(ctx), std::move(target), std::move(value), prob};
    } catch (const ModelError& ex) {
      throw ParseError(merge(start, tokens_[pos_ - 1].span), ex.what());
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// Wraps ModelErrors that escape the parser (e.g. invalid tokens) as parse
// errors at the start of the input.
template <typename F>
auto guarded(std::string_view text, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const ModelError& ex) {
    throw ParseError(SourceSpan{1, 1, static_cast<std::size_t>(!text.empty()), 0}, ex.what());
  }
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ParseError::ParseError(SourceSpan span, std::string expected, std::string found)
    : Error(format_error(span, expected, found)), span_(span), expected_(std::move(expected)), found_(std::move(found)) {}

ParseError::ParseError(SourceSpan span, std::string message) : ParseError(span, "", std::move(message)) {}

Case parse_case(std::string_view text) {
  return guarded(text, [&] { return Parser{text}.parse_case(); });
}

CausalGraph parse_graph(std::string_view text) {
  return guarded(text, [&] {
    Parser p{text};
    auto g = p.graph_block();
    if (p.at(Tok::end)) return g;
    return parse_case(text).graph;
  });
}

ValueTerm parse_value_term(std::string_view text) {
  return guarded(text, [&] {
    Parser p{text};
    auto v = p.value_term();
    p.expect_end();
    return v;
  });
}

ContextItem parse_context_item(std::string_view text) {
  return guarded(text, [&] {
    Parser p{text};
    auto item = p.item();
    p.expect_end();
    return item;
  });
}

Judgment parse_judgment(std::string_view text) {
  return guarded(text, [&] {
    Parser p{text};
    auto j = p.judgment();
    p.expect_end();
    return j;
  });
}

std::vector<Judgment> parse_judgment_db(std::string_view text) {
  return guarded(text, [&] {
    Parser p{text};
    std::vector<Judgment> out;
    while (!p.at(Tok::end)) {
      out.push_back(p.judgment());
      p.expect(Tok::semi);
    }
    return out;
  });
}

Probability parse_probability(std::string_view text) {
  return guarded(text, [&] {
    Parser p{text};
    auto prob = p.probability();
    p.expect_end();
    return prob;
  });
}

std::string render_attribution(const Attribution& a) { return a.to_string(); }

std::string render_intervention_expr(const InterventionExpr& e) {
  std::vector<std::string> parts;
  for (const auto& edge : e.graph().edges()) parts.push_back(edge.to_string());
  for (const auto& n : e.graph().isolated_nodes()) parts.push_back(n.name());
  for (const auto& a : e.datapoint()) parts.push_back(a.to_string());
  const auto& iv = e.intervention();
  return "[" + join(parts, ", ") + "] I(" + iv.var.name() + "=" + iv.value.to_string() + ")";
}

std::string render_item(const ContextItem& item) {
  switch (item.kind()) {
    case ContextItem::Kind::intervention: return render_intervention_expr(item.intervention());
    case ContextItem::Kind::edge: return item.edge().to_string();
    case ContextItem::Kind::attribution: return item.attribution().to_string();
  }
  return {};
}

std::string render_judgment(const Judgment& j) {
  std::vector<std::string> parts;
  if (const auto* e = j.intervention()) parts.push_back(render_intervention_expr(*e));
  std::vector<Edge> edges;
  for (const auto& item : j.context())
    if (item.is_edge()) edges.push_back(item.edge());
  std::sort(edges.begin(), edges.end());
  for (const auto& e : edges) parts.push_back(e.to_string());
  for (const auto& item : j.context())
    if (item.is_attribution()) parts.push_back(item.attribution().to_string());
  std::string conclusion =
      "|- " + j.target().name() + " = " + j.value().to_string() + " @ " + j.prob().to_string();
  if (parts.empty()) return conclusion;
  return join(parts, ", ") + " " + conclusion;
}

std::string render_graph(const CausalGraph& g) {
  std::string out = "graph {\n";
  for (const auto& e : g.edges()) out += "  " + e.to_string() + ";\n";
  for (const auto& n : g.isolated_nodes()) out += "  " + n.name() + ";\n";
  return out + "}\n";
}

namespace {
std::string render_block(std::string_view keyword, const DataPoint& dp) {
  std::string out = std::string(keyword) + " {\n";
  for (const auto& a : dp) out += "  " + a.to_string() + ";\n";
  return out + "}\n";
}
}  // namespace

std::string render_case(const Case& c) {
  std::string out = render_graph(c.graph);
  out += render_block("factual", c.factual);
  out += "intervene " + c.intervention.var.name() + " = " + c.intervention.value.to_string() + ";\n";
  out += "target " + c.target.name() + " = " + c.target_value.to_string() + ";\n";
  if (c.candidate_override) out += render_block("candidate", *c.candidate_override);
  if (c.factual_prob) out += "factual_prob " + c.factual_prob->to_string() + ";\n";
  return out;
}

}  // namespace cfair::dsl
