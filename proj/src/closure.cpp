#include "cfair/closure.hpp"

#include <algorithm>
#include <deque>

namespace cfair {
namespace {

using Adjacency = std::map<VariableId, std::vector<VariableId>>;

Adjacency children_map(const VariableSet& nodes, const EdgeSet& edges) {
  Adjacency adj;
  for (const auto& n : nodes) adj[n];
  // EdgeSet iterates in (from, to) order, so child lists come out sorted.
  for (const auto& e : edges) {
    adj[e.from].push_back(e.to);
    adj[e.to];
  }
  return adj;
}

void require_node(const CausalGraph& g, const VariableId& a) {
  if (!g.has_node(a)) throw ModelError("unknown variable '" + a.name() + "'");
}

VariableSet reach(const Adjacency& adj, const VariableId& start) {
  VariableSet seen{start};
  std::deque<VariableId> queue{start};
  while (!queue.empty()) {
    auto v = std::move(queue.front());
    queue.pop_front();
    for (const auto& c : adj.at(v))
      if (seen.insert(c).second) queue.push_back(c);
  }
  return seen;
}

}  // namespace

std::optional<std::vector<VariableId>> check_acyclic(const VariableSet& nodes, const EdgeSet& edges) {
  const auto adj = children_map(nodes, edges);
  enum class Mark { white, grey, black };
  std::map<VariableId, Mark> mark;
  for (const auto& [v, _] : adj) mark[v] = Mark::white;

  // Iterative DFS; `path` mirrors the grey nodes in stack order.
  struct Frame {
    VariableId node;
    std::size_t next_child;
  };
  for (const auto& [root, _] : adj) {
    if (mark[root] != Mark::white) continue;
    std::vector<Frame> stack{{root, 0}};
    mark[root] = Mark::grey;
    while (!stack.empty()) {
      auto& top = stack.back();
      const auto& kids = adj.at(top.node);
      if (top.next_child == kids.size()) {
        mark[top.node] = Mark::black;
        stack.pop_back();
        continue;
      }
      const auto& child = kids[top.next_child++];
      if (mark[child] == Mark::grey) {
        std::vector<VariableId> cycle;
        auto it = std::find_if(stack.begin(), stack.end(), [&](const Frame& f) { return f.node == child; });
        for (; it != stack.end(); ++it) cycle.push_back(it->node);
        cycle.push_back(child);
        return cycle;
      }
      if (mark[child] == Mark::white) {
        mark[child] = Mark::grey;
        stack.push_back({child, 0});
      }
    }
  }
  return std::nullopt;
}

bool MediateRelation::contains(const VariableId& from, const VariableId& to) const {
  return entries_.contains({from, to});
}

const VariableSet* MediateRelation::witnesses(const VariableId& from, const VariableId& to) const {
  auto it = entries_.find({from, to});
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<MediateEntry> MediateRelation::entries() const {
  std::vector<MediateEntry> out;
  out.reserve(entries_.size());
  for (const auto& [key, m] : entries_) out.push_back({key.first, key.second, m});
  return out;
}

MediateRelation mediate_closure(const CausalGraph& g) {
  const auto adj = children_map(g.nodes(), g.edges());
  std::map<VariableId, VariableSet> reachable;
  for (const auto& v : g.nodes()) reachable.emplace(v, reach(adj, v));

  // In a DAG, v lies on some a->b path iff a reaches v and v reaches b.
  std::map<MediateRelation::Key, VariableSet> entries;
  for (const auto& a : g.nodes()) {
    const auto& from_a = reachable.at(a);
    for (const auto& b : from_a) {
      if (a == b) {
        entries[{a, a}] = {a};
        continue;
      }
      VariableSet m;
      for (const auto& v : from_a)
        if (v != a && reachable.at(v).contains(b)) m.insert(v);
      entries[{a, b}] = std::move(m);
    }
  }
  return MediateRelation{std::move(entries)};
}

VariableSet descendants(const CausalGraph& g, const VariableId& a) {
  require_node(g, a);
  return reach(children_map(g.nodes(), g.edges()), a);
}

CausalGraph intervene_graph(const CausalGraph& g, const VariableId& a) {
  require_node(g, a);
  EdgeSet kept;
  for (const auto& e : g.edges())
    if (e.to != a) kept.insert(e);
  return CausalGraph{g.nodes(), std::move(kept)};
}

}  // namespace cfair
