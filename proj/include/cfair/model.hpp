#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "cfair/error.hpp"
#include "cfair/probability.hpp"
#include "cfair/value_term.hpp"

namespace cfair {

/// Name of a classifier feature or target. Case-sensitive token.
class VariableId {
 public:
  explicit VariableId(std::string name);

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const VariableId&, const VariableId&) = default;
  friend auto operator<=>(const VariableId&, const VariableId&) = default;

 private:
  std::string name_;
};

using VariableSet = std::set<VariableId>;

struct Attribution {
  VariableId var;
  ValueTerm value;

  std::string to_string() const;

  friend bool operator==(const Attribution&, const Attribution&) = default;
  friend std::strong_ordering operator<=>(const Attribution& a, const Attribution& b);
};

/// Ordered attributions describing one individual; each variable at most once.
class DataPoint {
 public:
  DataPoint() = default;
  explicit DataPoint(std::vector<Attribution> attributions);

  const std::vector<Attribution>& attributions() const noexcept { return attributions_; }
  bool empty() const noexcept { return attributions_.empty(); }
  std::size_t size() const noexcept { return attributions_.size(); }

  const Attribution* find(const VariableId& var) const;
  bool contains(const Attribution& attr) const;

  auto begin() const { return attributions_.begin(); }
  auto end() const { return attributions_.end(); }

  friend bool operator==(const DataPoint&, const DataPoint&) = default;
  friend std::strong_ordering operator<=>(const DataPoint& a, const DataPoint& b);

 private:
  std::vector<Attribution> attributions_;
};

/// The set of variables a data point assigns values to.
VariableSet variables_of(const DataPoint& dp);

/// Immediate causal relation `from |> to`.
struct Edge {
  VariableId from;
  VariableId to;

  std::string to_string() const;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using EdgeSet = std::set<Edge>;

/// Thrown when a candidate graph contains a directed cycle.
class CycleError : public ModelError {
 public:
  explicit CycleError(std::vector<VariableId> cycle);
  const std::vector<VariableId>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<VariableId> cycle_;
};

/// Acyclic directed graph of immediate causal relations. Validated on
/// construction: endpoints are nodes, no self-edges, no cycles.
class CausalGraph {
 public:
  CausalGraph() = default;
  CausalGraph(VariableSet nodes, EdgeSet edges);

  /// Nodes are the edge endpoints plus `extra_nodes`.
  static CausalGraph from_edges(const EdgeSet& edges, const VariableSet& extra_nodes = {});

  const VariableSet& nodes() const noexcept { return nodes_; }
  const EdgeSet& edges() const noexcept { return edges_; }

  bool has_node(const VariableId& v) const { return nodes_.contains(v); }
  bool has_edge(const Edge& e) const { return edges_.contains(e); }

  std::vector<VariableId> children(const VariableId& v) const;
  std::vector<VariableId> parents(const VariableId& v) const;

  /// Nodes that are not the endpoint of any edge.
  VariableSet isolated_nodes() const;

  friend bool operator==(const CausalGraph&, const CausalGraph&) = default;
  friend auto operator<=>(const CausalGraph&, const CausalGraph&) = default;

 private:
  VariableSet nodes_;
  EdgeSet edges_;
};

/// I(var = value); the value is always atomic.
struct Intervention {
  Intervention(VariableId var, ValueTerm value);

  VariableId var;
  ValueTerm value;

  Attribution as_attribution() const { return {var, value}; }

  friend bool operator==(const Intervention&, const Intervention&) = default;
  friend std::strong_ordering operator<=>(const Intervention& a, const Intervention& b);
};

/// [graph, datapoint] I(var = value): the factual situation together with
/// the intervention operated on it.
class InterventionExpr {
 public:
  InterventionExpr(CausalGraph graph, DataPoint datapoint, Intervention intervention);

  const CausalGraph& graph() const noexcept { return graph_; }
  const DataPoint& datapoint() const noexcept { return datapoint_; }
  const Intervention& intervention() const noexcept { return intervention_; }

  friend bool operator==(const InterventionExpr&, const InterventionExpr&) = default;
  friend std::strong_ordering operator<=>(const InterventionExpr& a, const InterventionExpr& b);

 private:
  CausalGraph graph_;
  DataPoint datapoint_;
  Intervention intervention_;
};

/// One formula on the left of a judgment.
class ContextItem {
 public:
  enum class Kind { intervention = 0, edge = 1, attribution = 2 };

  ContextItem(Edge e) : item_(std::move(e)) {}                  // NOLINT
  ContextItem(Attribution a) : item_(std::move(a)) {}           // NOLINT
  ContextItem(InterventionExpr x) : item_(std::move(x)) {}      // NOLINT

  Kind kind() const noexcept;
  bool is_edge() const noexcept { return kind() == Kind::edge; }
  bool is_attribution() const noexcept { return kind() == Kind::attribution; }
  bool is_intervention() const noexcept { return kind() == Kind::intervention; }

  const Edge& edge() const { return std::get<Edge>(item_); }
  const Attribution& attribution() const { return std::get<Attribution>(item_); }
  const InterventionExpr& intervention() const { return std::get<InterventionExpr>(item_); }

  friend bool operator==(const ContextItem&, const ContextItem&) = default;
  friend std::strong_ordering operator<=>(const ContextItem& a, const ContextItem& b);

 private:
  std::variant<InterventionExpr, Edge, Attribution> item_;
};

/// context |- target = value @ prob
///
/// The context is a multiset: equality ignores item order. At most one
/// intervention expression, and the target is never assigned in the context.
class Judgment {
 public:
  Judgment(std::vector<ContextItem> context, VariableId target, ValueTerm value, Probability prob);

  const std::vector<ContextItem>& context() const noexcept { return context_; }
  const VariableId& target() const noexcept { return target_; }
  const ValueTerm& value() const noexcept { return value_; }
  const Probability& prob() const noexcept { return prob_; }

  const InterventionExpr* intervention() const;

  /// Context sorted into a canonical order, for multiset comparison.
  std::vector<ContextItem> sorted_context() const;

  /// Multiset equality on contexts plus exact conclusion equality.
  friend bool operator==(const Judgment& a, const Judgment& b);

  bool same_conclusion(const Judgment& other) const {
    return target_ == other.target_ && value_ == other.value_ && prob_ == other.prob_;
  }

 private:
  std::vector<ContextItem> context_;
  VariableId target_;
  ValueTerm value_;
  Probability prob_;
};

/// True when the two contexts are equal as multisets.
bool same_multiset(const std::vector<ContextItem>& a, const std::vector<ContextItem>& b);

}  // namespace cfair
