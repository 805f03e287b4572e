#pragma once

#include <deque>
#include <numeric>
#include <utility>
#include <vector>

namespace resched::detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Feeds edges into a union-find until one closes a cycle, then recovers the
// path between its endpoints by BFS over the accepted edges. Returns edge
// ids in cyclic order (consecutive edges share an endpoint), empty if the
// graph is a forest.
inline std::vector<int> find_cycle(
    int num_nodes, const std::vector<std::pair<int, int>>& edges) {
  UnionFind uf(num_nodes);
  std::vector<std::vector<std::pair<int, int>>> adj(num_nodes);
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    auto [u, v] = edges[e];
    if (uf.unite(u, v)) {
      adj[u].push_back({v, e});
      adj[v].push_back({u, e});
      continue;
    }
    std::vector<int> prev(num_nodes, -1), prev_edge(num_nodes, -1);
    std::deque<int> queue{u};
    prev[u] = u;
    while (!queue.empty()) {
      int a = queue.front();
      queue.pop_front();
      if (a == v) break;
      for (auto [b, eid] : adj[a])
        if (prev[b] < 0) {
          prev[b] = a;
          prev_edge[b] = eid;
          queue.push_back(b);
        }
    }
    std::vector<int> cyc{e};
    for (int a = v; a != u; a = prev[a]) cyc.push_back(prev_edge[a]);
    return cyc;
  }
  return {};
}

}  // namespace resched::detail
