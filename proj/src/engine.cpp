#include "cfair/engine.hpp"

#include <algorithm>

#include "cfair/closure.hpp"
#include "cfair/dsl.hpp"

namespace cfair {

Candidate build_candidate(const Case& c) {
  validate_case(c);
  const auto& iv = c.intervention;
  const auto effects = descendants(c.graph, iv.var);
  std::vector<Attribution> attrs{iv.as_attribution()};
  for (const auto& a : c.factual)
    if (!effects.contains(a.var)) attrs.push_back(a);
  return {intervene_graph(c.graph, iv.var), DataPoint{std::move(attrs)}};
}

Judgment candidate_judgment(const CausalGraph& graph, const DataPoint& datapoint, const VariableId& target,
                            const ValueTerm& value, const Probability& q) {
  std::vector<ContextItem> ctx;
  for (const auto& e : graph.edges()) ctx.emplace_back(e);
  for (const auto& a : datapoint) ctx.emplace_back(a);
  return Judgment{std::move(ctx), target, value, q};
}

std::string CandidateFailure::to_string() const {
  std::string out = "candidate is not a counterfactual; non-erasable items:";
  for (const auto& n : items)
    out += "\n  " + dsl::render_item(n.item) + ": " + std::string(violation_label(n.reason)) + " (" + n.detail + ")";
  return out;
}

NotCounterfactual::NotCounterfactual(CandidateFailure failure)
    : Error(failure.to_string()), failure_(std::move(failure)) {}

std::variant<Proof, CandidateFailure> verify_candidate(const Case& c, const Judgment& candidate,
                                                       const KernelOptions& options) {
  if (candidate.intervention() != nullptr)
    throw ModelError("a counterfactual candidate must not carry an intervention expression");

  Proof proof;
  std::size_t current = proof.add_assumption(candidate);
  const auto expr = intervention_expr(c);
  Judgment j = apply_c_weakening(candidate, expr);
  current = proof.add_step(RuleId::c_weakening, expr, {current}, j);

  CandidateFailure failure;
  const Attribution imposed = c.intervention.as_attribution();
  while (true) {
    try {
      auto next = apply_i_cut(j);
      current = proof.add_step(RuleId::i_cut, imposed, {current}, next);
      j = std::move(next);
    } catch (const RuleViolation&) {
      break;
    }
  }

  std::vector<Edge> edges;
  std::vector<Attribution> attrs;
  for (const auto& item : j.context()) {
    if (item.is_edge()) edges.push_back(item.edge());
    if (item.is_attribution()) attrs.push_back(item.attribution());
  }
  std::sort(edges.begin(), edges.end());

  for (const auto& e : edges) {
    try {
      auto next = apply_tri_cut(j, e, options.edges);
      current = proof.add_step(RuleId::tri_cut, e, {current}, next);
      j = std::move(next);
    } catch (const RuleViolation& ex) {
      failure.items.push_back({e, ex.code(), ex.detail()});
    }
  }
  for (const auto& a : attrs) {
    try {
      auto next = apply_v_cut(j, a);
      current = proof.add_step(RuleId::v_cut, a, {current}, next);
      j = std::move(next);
    } catch (const RuleViolation& ex) {
      failure.items.push_back({a, ex.code(), ex.detail()});
    }
  }
  if (!failure.items.empty()) return failure;
  return proof;
}

Derivation derive_counterfactual(const Case& c, const ClassifierOracle& oracle, const KernelOptions& options) {
  auto candidate = build_candidate(c);
  if (c.candidate_override) candidate.datapoint = *c.candidate_override;
  // The rules never look at the probability, so a non-counterfactual
  // candidate is rejected before the oracle is consulted.
  auto probe = candidate_judgment(candidate.graph, candidate.datapoint, c.target, c.target_value, Probability::zero());
  auto probed = verify_candidate(c, probe, options);
  if (auto* failure = std::get_if<CandidateFailure>(&probed)) throw NotCounterfactual(std::move(*failure));
  const auto q = oracle.query(OracleQuery{candidate.datapoint, c.target, c.target_value});
  auto judgment = candidate_judgment(candidate.graph, candidate.datapoint, c.target, c.target_value, q);
  auto result = verify_candidate(c, judgment, options);
  auto proof = std::get<Proof>(std::move(result));
  auto conclusion = proof.conclusion();
  return {std::move(conclusion), std::move(proof)};
}

Verdict cf_verdict(const Probability& p, const Probability& q, const Probability& epsilon, Judgment cf_judgment,
                   Proof proof) {
  auto diff = abs_difference(p, q);
  return Verdict{diff <= epsilon, p, q, diff, epsilon, std::move(cf_judgment), std::move(proof)};
}

Probability factual_probability(const Case& c, const ClassifierOracle& oracle) {
  const OracleQuery query{c.factual, c.target, c.target_value};
  if (!c.factual_prob) return oracle.query(query);
  try {
    auto answered = oracle.query(query);
    if (answered != *c.factual_prob)
      throw ConsistencyError("factual_prob " + c.factual_prob->to_string() + " disagrees with the oracle's " +
                             answered.to_string());
  } catch (const OracleError&) {
    // The oracle may only know the counterfactual side; the case's
    // assumption stands on its own.
  }
  return *c.factual_prob;
}

Verdict check_case(const Case& c, const ClassifierOracle& oracle, const Probability& epsilon,
                   const KernelOptions& options) {
  validate_case(c);
  const auto p = factual_probability(c, oracle);
  auto derivation = derive_counterfactual(c, oracle, options);
  const auto q = derivation.judgment.prob();
  return cf_verdict(p, q, epsilon, std::move(derivation.judgment), std::move(derivation.proof));
}

std::optional<ProofFailure> check_proof_for_case(const Case& c, const Proof& proof, const KernelOptions& options) {
  if (auto failure = check_proof(proof, options)) return failure;
  const std::size_t last = proof.steps.empty() ? 0 : proof.steps.size() - 1;
  if (proof.assumptions.size() != 1 || proof.assumptions.front().intervention() != nullptr)
    return ProofFailure{0, Violation::item_mismatch, "proof must start from a single intervention-free candidate"};
  if (proof.steps.empty()) return ProofFailure{0, Violation::conclusion_mismatch, "proof has no steps"};
  const auto& end = proof.conclusion();
  const std::vector<ContextItem> expected{ContextItem{intervention_expr(c)}};
  if (!same_multiset(end.context(), expected))
    return ProofFailure{last, Violation::conclusion_mismatch,
                        "final context is not [case graph, case factual] I(" + c.intervention.var.name() + "=" +
                            c.intervention.value.to_string() + ") alone"};
  if (end.target() != c.target || end.value() != c.target_value)
    return ProofFailure{last, Violation::conclusion_mismatch, "final conclusion is not about the case's target"};
  return std::nullopt;
}

}  // namespace cfair
