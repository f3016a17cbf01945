#include "cfair/model.hpp"

#include <algorithm>

#include "cfair/closure.hpp"

namespace cfair {

VariableId::VariableId(std::string name) : name_(std::move(name)) {
  if (!is_token(name_)) throw ModelError("invalid variable name '" + name_ + "'");
}

std::string Attribution::to_string() const { return var.name() + " = " + value.to_string(); }

std::strong_ordering operator<=>(const Attribution& a, const Attribution& b) {
  if (auto c = a.var <=> b.var; c != 0) return c;
  return a.value <=> b.value;
}

DataPoint::DataPoint(std::vector<Attribution> attributions) : attributions_(std::move(attributions)) {
  VariableSet seen;
  for (const auto& a : attributions_)
    if (!seen.insert(a.var).second)
      throw ModelError("variable '" + a.var.name() + "' assigned twice in data point");
}

const Attribution* DataPoint::find(const VariableId& var) const {
  auto it = std::find_if(attributions_.begin(), attributions_.end(),
                         [&](const Attribution& a) { return a.var == var; });
  return it == attributions_.end() ? nullptr : &*it;
}

bool DataPoint::contains(const Attribution& attr) const {
  const auto* found = find(attr.var);
  return found != nullptr && found->value == attr.value;
}

std::strong_ordering operator<=>(const DataPoint& a, const DataPoint& b) {
  return std::lexicographical_compare_three_way(a.attributions_.begin(), a.attributions_.end(),
                                                b.attributions_.begin(), b.attributions_.end());
}

VariableSet variables_of(const DataPoint& dp) {
  VariableSet out;
  for (const auto& a : dp) out.insert(a.var);
  return out;
}

std::string Edge::to_string() const { return from.name() + " -> " + to.name(); }

namespace {
std::string describe_cycle(const std::vector<VariableId>& cycle) {
  std::string s = "cycle: ";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) s += ", ";
    s += cycle[i].name();
  }
  return s;
}
}  // namespace

CycleError::CycleError(std::vector<VariableId> cycle)
    : ModelError(describe_cycle(cycle)), cycle_(std::move(cycle)) {}

CausalGraph::CausalGraph(VariableSet nodes, EdgeSet edges) : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (!nodes_.contains(e.from) || !nodes_.contains(e.to))
      throw ModelError("edge " + e.to_string() + " has an endpoint outside the graph");
    if (e.from == e.to) throw CycleError({e.from, e.to});
  }
  if (auto cycle = check_acyclic(nodes_, edges_)) throw CycleError(std::move(*cycle));
}

CausalGraph CausalGraph::from_edges(const EdgeSet& edges, const VariableSet& extra_nodes) {
  VariableSet nodes = extra_nodes;
  for (const auto& e : edges) {
    nodes.insert(e.from);
    nodes.insert(e.to);
  }
  return CausalGraph{std::move(nodes), edges};
}

std::vector<VariableId> CausalGraph::children(const VariableId& v) const {
  std::vector<VariableId> out;
  for (const auto& e : edges_)
    if (e.from == v) out.push_back(e.to);
  return out;
}

std::vector<VariableId> CausalGraph::parents(const VariableId& v) const {
  std::vector<VariableId> out;
  for (const auto& e : edges_)
    if (e.to == v) out.push_back(e.from);
  return out;
}

VariableSet CausalGraph::isolated_nodes() const {
  VariableSet out = nodes_;
  for (const auto& e : edges_) {
    out.erase(e.from);
    out.erase(e.to);
  }
  return out;
}

Intervention::Intervention(VariableId v, ValueTerm val) : var(std::move(v)), value(std::move(val)) {
  if (!value.is_atom())
    throw ModelError("intervention value must be atomic, got '" + value.to_string() + "'");
}

std::strong_ordering operator<=>(const Intervention& a, const Intervention& b) {
  if (auto c = a.var <=> b.var; c != 0) return c;
  return a.value <=> b.value;
}

InterventionExpr::InterventionExpr(CausalGraph graph, DataPoint datapoint, Intervention intervention)
    : graph_(std::move(graph)), datapoint_(std::move(datapoint)), intervention_(std::move(intervention)) {
  if (!graph_.has_node(intervention_.var))
    throw ModelError("intervention variable '" + intervention_.var.name() + "' is not a graph node");
  for (const auto& a : datapoint_)
    if (!graph_.has_node(a.var))
      throw ModelError("data point variable '" + a.var.name() + "' is not a graph node");
}

std::strong_ordering operator<=>(const InterventionExpr& a, const InterventionExpr& b) {
  if (auto c = a.graph_ <=> b.graph_; c != 0) return c;
  if (auto c = a.datapoint_ <=> b.datapoint_; c != 0) return c;
  return a.intervention_ <=> b.intervention_;
}

ContextItem::Kind ContextItem::kind() const noexcept { return static_cast<Kind>(item_.index()); }

std::strong_ordering operator<=>(const ContextItem& a, const ContextItem& b) {
  if (auto c = a.item_.index() <=> b.item_.index(); c != 0) return c;
  switch (a.kind()) {
    case ContextItem::Kind::intervention:
      return a.intervention() <=> b.intervention();
    case ContextItem::Kind::edge:
      return a.edge() <=> b.edge();
    case ContextItem::Kind::attribution:
      return a.attribution() <=> b.attribution();
  }
  return std::strong_ordering::equal;
}

Judgment::Judgment(std::vector<ContextItem> context, VariableId target, ValueTerm value, Probability prob)
    : context_(std::move(context)), target_(std::move(target)), value_(std::move(value)), prob_(prob) {
  std::size_t interventions = 0;
  for (const auto& item : context_) {
    if (item.is_intervention()) ++interventions;
    if (item.is_attribution() && item.attribution().var == target_)
      throw ModelError("target '" + target_.name() + "' is assigned in the context");
  }
  if (interventions > 1) throw ModelError("a judgment context holds at most one intervention expression");
}

const InterventionExpr* Judgment::intervention() const {
  for (const auto& item : context_)
    if (item.is_intervention()) return &item.intervention();
  return nullptr;
}

std::vector<ContextItem> Judgment::sorted_context() const {
  auto out = context_;
  std::sort(out.begin(), out.end());
  return out;
}

bool same_multiset(const std::vector<ContextItem>& a, const std::vector<ContextItem>& b) {
  if (a.size() != b.size()) return false;
  auto sa = a;
  auto sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  return sa == sb;
}

bool operator==(const Judgment& a, const Judgment& b) {
  return a.same_conclusion(b) && same_multiset(a.context_, b.context_);
}

}  // namespace cfair
