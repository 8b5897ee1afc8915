#pragma once

// Brute-force references shared by unit tests and the acceptance run.

#include "bimcalc/decomposition.hpp"

#include <deque>

namespace oracle {

using namespace bimcalc;

// (object, block) pairs reachable from each other through generator supports, by breadth-first search.
inline std::vector<std::vector<int>> reachability(const Presentation& b) {
  std::vector<std::pair<int, int>> verts;
  for (size_t o = 0; o < b.objects.size(); ++o)
    for (int i = 0; i < b.objects[o].size(); ++i) verts.push_back({static_cast<int>(o), i});
  auto id = [&](int o, int i) {
    for (size_t v = 0; v < verts.size(); ++v)
      if (verts[v] == std::make_pair(o, i)) return static_cast<int>(v);
    return -1;
  };
  const size_t n = verts.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& g : b.generators)
    for (int j = 0; j < g.x.target.size(); ++j)
      for (int i = 0; i < g.x.source.size(); ++i)
        if (g.x.k(j, i)) {
          int a = id(g.target, j), c = id(g.source, i);
          adj[static_cast<size_t>(a)].push_back(c);
          adj[static_cast<size_t>(c)].push_back(a);
        }
  std::vector<std::vector<int>> reach(n, std::vector<int>(n, 0));
  for (size_t s = 0; s < n; ++s) {
    std::deque<int> q{static_cast<int>(s)};
    reach[s][s] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop_front();
      for (int w : adj[static_cast<size_t>(v)])
        if (!reach[s][static_cast<size_t>(w)]) {
          reach[s][static_cast<size_t>(w)] = 1;
          q.push_back(w);
        }
    }
  }
  return reach;
}

inline int class_of_block(const SimRelation& rel, int object, int block) {
  for (size_t a = 0; a < rel.nodes.size(); ++a)
    if (rel.nodes[a].object == object)
      for (int b : rel.nodes[a].blocks)
        if (b == block) return rel.class_of[a];
  return -1;
}

}  // namespace oracle
