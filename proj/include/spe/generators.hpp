#pragma once
#include <cstdint>
#include <string>

#include "spe/graph.hpp"

namespace spe {

Graph gen_cycle(int n);             // n >= 3
Graph gen_path(int n);              // n >= 2
Graph gen_grid(int h, int w);       // 4-neighbor grid, h*w >= 2
Graph gen_complete(int n);          // n >= 2
Graph gen_erdos_renyi(int n, double p, uint64_t seed);

// Same-degree-sequence pair: g1 contains a triangle, g2 is bipartite, and the
// degree multiset of both is {3, 2, ..., 2, 1}. Both carry the node feature
// x_i = sqrt(deg_i), which L annihilates on connected graphs. n >= 5.
struct GraphPair {
  Graph g1;  // triangle w1w2w3 plus a path hung off w1
  Graph g2;  // complete-bipartite-minus-edge core, path appended on
             // alternating sides
};
GraphPair gen_bipartite_pair(int n);

// dispatch by family name: cycle, path, grid, complete, erdos_renyi
Graph generate(const std::string& family, int n, int h, int w, double p, uint64_t seed);

}  // namespace spe
