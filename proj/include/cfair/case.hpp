#pragma once

#include <optional>

#include "cfair/model.hpp"

namespace cfair {

/// One CF question: the factual individual, the causal graph of the
/// classifier's features, the intervention on the protected variable and the
/// target decision.
struct Case {
  CausalGraph graph;
  DataPoint factual;
  std::optional<Probability> factual_prob;
  Intervention intervention;
  VariableId target;
  ValueTerm target_value;
  std::optional<DataPoint> candidate_override;

  friend bool operator==(const Case&, const Case&) = default;
};

/// Throws ModelError unless target and intervention variable are distinct
/// graph nodes, every factual (and override) variable is a node, and the
/// target is not assigned in the factual data point.
void validate_case(const Case& c);

/// [graph, factual] I(a_j = alpha) for the case.
InterventionExpr intervention_expr(const Case& c);

}  // namespace cfair
