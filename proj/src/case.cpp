#include "cfair/case.hpp"

namespace cfair {

namespace {
void require_nodes(const CausalGraph& g, const DataPoint& dp, const char* what) {
  for (const auto& a : dp)
    if (!g.has_node(a.var))
      throw ModelError(std::string(what) + " variable '" + a.var.name() + "' is not a graph node");
}
}  // namespace

void validate_case(const Case& c) {
  if (!c.graph.has_node(c.target)) throw ModelError("target '" + c.target.name() + "' is not a graph node");
  if (!c.graph.has_node(c.intervention.var))
    throw ModelError("intervention variable '" + c.intervention.var.name() + "' is not a graph node");
  if (c.intervention.var == c.target) throw ModelError("cannot intervene on the target variable");
  require_nodes(c.graph, c.factual, "factual");
  if (c.factual.find(c.target) != nullptr)
    throw ModelError("target '" + c.target.name() + "' is assigned in the factual data point");
  if (c.candidate_override) {
    require_nodes(c.graph, *c.candidate_override, "candidate");
    if (c.candidate_override->find(c.target) != nullptr)
      throw ModelError("target '" + c.target.name() + "' is assigned in the candidate data point");
  }
}

InterventionExpr intervention_expr(const Case& c) { return InterventionExpr{c.graph, c.factual, c.intervention}; }

}  // namespace cfair
