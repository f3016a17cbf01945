#include "cfair/kernel.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "cfair/closure.hpp"

namespace cfair {
namespace {

constexpr std::array<std::pair<RuleId, std::string_view>, 6> kRuleNames{{
    {RuleId::c_weakening, "c_weakening"},
    {RuleId::i_cut, "i_cut"},
    {RuleId::tri_cut, "tri_cut"},
    {RuleId::v_cut, "v_cut"},
    {RuleId::generic_cut, "generic_cut"},
    {RuleId::intervention_axiom, "intervention_axiom"},
}};

std::string describe(const Judgment& j) {
  return std::to_string(j.context().size()) + " context item(s) |- " + j.target().name() + " = " +
         j.value().to_string() + " @ " + j.prob().to_string();
}

[[noreturn]] void violate(Violation v, const std::string& detail) { throw RuleViolation(v, detail); }

const InterventionExpr& require_intervention(const Judgment& j) {
  const auto* e = j.intervention();
  if (e == nullptr) violate(Violation::no_intervention, "context has no intervention expression");
  return *e;
}

/// Copy of the context with the first occurrence of `item` removed, or
/// nullopt when it does not occur.
std::optional<std::vector<ContextItem>> erase_one(const std::vector<ContextItem>& ctx, const ContextItem& item) {
  auto it = std::find(ctx.begin(), ctx.end(), item);
  if (it == ctx.end()) return std::nullopt;
  std::vector<ContextItem> out;
  out.reserve(ctx.size() - 1);
  out.insert(out.end(), ctx.begin(), it);
  out.insert(out.end(), std::next(it), ctx.end());
  return out;
}

Judgment rebuild(const Judgment& j, std::vector<ContextItem> ctx) {
  try {
    return Judgment{std::move(ctx), j.target(), j.value(), j.prob()};
  } catch (const ModelError& ex) {
    violate(Violation::ill_formed, ex.what());
  }
}

}  // namespace

std::string_view rule_name(RuleId rule) noexcept {
  for (const auto& [id, name] : kRuleNames)
    if (id == rule) return name;
  return "?";
}

std::optional<RuleId> parse_rule_name(std::string_view name) noexcept {
  for (const auto& [id, n] : kRuleNames)
    if (n == name) return id;
  return std::nullopt;
}

std::string_view violation_label(Violation v) noexcept {
  switch (v) {
    case Violation::intervention_present: return "intervention present";
    case Violation::no_intervention: return "no intervention";
    case Violation::attribution_absent: return "attribution absent";
    case Violation::value_mismatch: return "value mismatch";
    case Violation::condition_star: return "condition (*)";
    case Violation::edge_absent: return "edge absent";
    case Violation::edge_not_factual: return "edge not in factual graph";
    case Violation::condition_double_star: return "condition (**)";
    case Violation::not_in_factual: return "not in factual data point";
    case Violation::certainty_required: return "certainty required";
    case Violation::ill_formed: return "ill-formed judgment";
    case Violation::item_mismatch: return "item mismatch";
    case Violation::premise_order: return "premise order";
    case Violation::premise_arity: return "premise arity";
    case Violation::conclusion_mismatch: return "conclusion mismatch";
  }
  return "?";
}

RuleViolation::RuleViolation(Violation code, const std::string& detail)
    : Error(std::string(violation_label(code)) + ": " + detail), code_(code), detail_(detail) {}

Judgment apply_c_weakening(const Judgment& j, const InterventionExpr& e) {
  if (j.intervention() != nullptr)
    violate(Violation::intervention_present, "context already carries an intervention expression");
  auto ctx = j.context();
  ctx.emplace_back(e);
  return rebuild(j, std::move(ctx));
}

Judgment apply_i_cut(const Judgment& j) {
  const auto& iv = require_intervention(j).intervention();
  const Attribution imposed = iv.as_attribution();
  bool loose_var = false;
  for (const auto& item : j.context())
    if (item.is_attribution() && item.attribution().var == iv.var) loose_var = true;
  if (!loose_var) violate(Violation::attribution_absent, "no loose attribution for '" + iv.var.name() + "'");
  auto ctx = erase_one(j.context(), imposed);
  if (!ctx) violate(Violation::value_mismatch, "loose attribution differs from " + imposed.to_string());
  return rebuild(j, std::move(*ctx));
}

Judgment apply_tri_cut(const Judgment& j, const Edge& edge, EdgeMode mode) {
  const auto& e = require_intervention(j);
  if (edge.to == e.intervention().var)
    violate(Violation::condition_star, "edge " + edge.to_string() + " enters the intervened variable");
  auto ctx = erase_one(j.context(), edge);
  if (!ctx) violate(Violation::edge_absent, "edge " + edge.to_string() + " not in context");
  if (mode == EdgeMode::strict && !e.graph().has_edge(edge))
    violate(Violation::edge_not_factual, "edge " + edge.to_string() + " is not in the factual graph");
  return rebuild(j, std::move(*ctx));
}

Judgment apply_v_cut(const Judgment& j, const Attribution& attr) {
  const auto& e = require_intervention(j);
  const auto& protected_var = e.intervention().var;
  if (e.graph().has_node(attr.var) && descendants(e.graph(), protected_var).contains(attr.var))
    violate(Violation::condition_double_star,
            "'" + attr.var.name() + "' is an effect of '" + protected_var.name() + "'");
  if (!e.datapoint().contains(attr))
    violate(Violation::not_in_factual, attr.to_string() + " is not in the factual data point");
  auto ctx = erase_one(j.context(), attr);
  if (!ctx) violate(Violation::attribution_absent, attr.to_string() + " not in context");
  return rebuild(j, std::move(*ctx));
}

Judgment intervention_axiom(const InterventionExpr& e) {
  return Judgment{{ContextItem{e}}, e.intervention().var, e.intervention().value, Probability::one()};
}

Judgment generic_cut(const Judgment& left, const Judgment& right) {
  if (left.prob() != Probability::one())
    violate(Violation::certainty_required, "left premise has probability " + left.prob().to_string());
  const Attribution cut{left.target(), left.value()};
  auto rest = erase_one(right.context(), cut);
  if (!rest) violate(Violation::attribution_absent, cut.to_string() + " not in right premise");
  auto ctx = left.context();
  ctx.insert(ctx.end(), rest->begin(), rest->end());
  return rebuild(right, std::move(ctx));
}

std::size_t Proof::add_assumption(Judgment j) {
  assumptions.push_back(std::move(j));
  return assumptions.size() - 1;
}

std::size_t Proof::add_step(RuleId rule, ContextItem item, std::vector<std::size_t> premises, Judgment conclusion) {
  steps.push_back({rule, std::move(item), std::move(premises), std::move(conclusion)});
  return assumptions.size() + steps.size() - 1;
}

const Judgment& Proof::at(std::size_t index) const {
  if (index < assumptions.size()) return assumptions[index];
  return steps.at(index - assumptions.size()).conclusion;
}

const Judgment& Proof::conclusion() const {
  if (!steps.empty()) return steps.back().conclusion;
  return assumptions.at(assumptions.size() - 1);
}

std::size_t Proof::count(RuleId rule) const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [&](const ProofStep& s) { return s.rule == rule; }));
}

std::string ProofFailure::to_string() const {
  return std::string(violation_label(reason)) + " at step " + std::to_string(step) + ": " + detail;
}

Judgment replay_step(const Proof& proof, std::size_t index, const KernelOptions& options) {
  const auto& step = proof.steps.at(index);
  const std::size_t self = proof.assumptions.size() + index;
  for (auto p : step.premises)
    if (p >= self) violate(Violation::premise_order, "premise " + std::to_string(p) + " is not earlier");

  const std::size_t arity = step.rule == RuleId::intervention_axiom ? 0 : step.rule == RuleId::generic_cut ? 2 : 1;
  if (step.premises.size() != arity)
    violate(Violation::premise_arity, std::string(rule_name(step.rule)) + " takes " + std::to_string(arity) +
                                          " premise(s), got " + std::to_string(step.premises.size()));

  auto require_kind = [&](ContextItem::Kind kind) {
    if (step.item.kind() != kind) violate(Violation::item_mismatch, "wrong kind of item for this rule");
  };

  switch (step.rule) {
    case RuleId::c_weakening:
      require_kind(ContextItem::Kind::intervention);
      return apply_c_weakening(proof.at(step.premises[0]), step.item.intervention());
    case RuleId::i_cut: {
      const auto& premise = proof.at(step.premises[0]);
      auto out = apply_i_cut(premise);
      if (step.item != ContextItem{premise.intervention()->intervention().as_attribution()})
        violate(Violation::item_mismatch, "I-Cut erases the imposed attribution only");
      return out;
    }
    case RuleId::tri_cut:
      require_kind(ContextItem::Kind::edge);
      return apply_tri_cut(proof.at(step.premises[0]), step.item.edge(), options.edges);
    case RuleId::v_cut:
      require_kind(ContextItem::Kind::attribution);
      return apply_v_cut(proof.at(step.premises[0]), step.item.attribution());
    case RuleId::intervention_axiom:
      require_kind(ContextItem::Kind::intervention);
      return intervention_axiom(step.item.intervention());
    case RuleId::generic_cut: {
      require_kind(ContextItem::Kind::attribution);
      const auto& left = proof.at(step.premises[0]);
      if (step.item.attribution() != Attribution{left.target(), left.value()})
        violate(Violation::item_mismatch, "cut formula differs from the left conclusion");
      return generic_cut(left, proof.at(step.premises[1]));
    }
  }
  violate(Violation::item_mismatch, "unknown rule");
}

std::optional<ProofFailure> check_proof(const Proof& proof, const KernelOptions& options) {
  for (std::size_t i = 0; i < proof.steps.size(); ++i) {
    try {
      auto replayed = replay_step(proof, i, options);
      if (!(replayed == proof.steps[i].conclusion))
        return ProofFailure{i, Violation::conclusion_mismatch,
                            "replay gives " + describe(replayed) + ", recorded " + describe(proof.steps[i].conclusion)};
    } catch (const RuleViolation& ex) {
      return ProofFailure{i, ex.code(), ex.detail()};
    } catch (const ModelError& ex) {
      return ProofFailure{i, Violation::ill_formed, ex.what()};
    }
  }
  return std::nullopt;
}

}  // namespace cfair
