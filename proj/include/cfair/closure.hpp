#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "cfair/model.hpp"

namespace cfair {

/// Returns std::nullopt when the edges form no directed cycle over `nodes`,
/// otherwise one cycle as a closed node sequence (first == last).
/// Endpoints outside `nodes` are treated as nodes. Deterministic: the search
/// starts from the smallest node and visits children in sorted order.
std::optional<std::vector<VariableId>> check_acyclic(const VariableSet& nodes, const EdgeSet& edges);

struct MediateEntry {
  VariableId from;
  VariableId to;
  VariableSet witnesses;  ///< nodes of every from->to path, minus `from`

  friend bool operator==(const MediateEntry&, const MediateEntry&) = default;
};

/// Reflexive-transitive closure of the immediate causal relation, each pair
/// annotated with its intermediate causes.
class MediateRelation {
 public:
  using Key = std::pair<VariableId, VariableId>;

  explicit MediateRelation(std::map<Key, VariableSet> entries) : entries_(std::move(entries)) {}

  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(const VariableId& from, const VariableId& to) const;
  /// Witness set for (from, to), or nullptr when `to` is not an effect of `from`.
  const VariableSet* witnesses(const VariableId& from, const VariableId& to) const;

  /// Entries sorted by (from, to).
  std::vector<MediateEntry> entries() const;

  const std::map<Key, VariableSet>& raw() const noexcept { return entries_; }

 private:
  std::map<Key, VariableSet> entries_;
};

MediateRelation mediate_closure(const CausalGraph& g);

/// Every (reflexive or mediate) effect of `a`, `a` included.
/// Throws ModelError when `a` is not a node of `g`.
VariableSet descendants(const CausalGraph& g, const VariableId& a);

/// The graph with every edge entering `a` erased.
/// Throws ModelError when `a` is not a node of `g`.
CausalGraph intervene_graph(const CausalGraph& g, const VariableId& a);

}  // namespace cfair
