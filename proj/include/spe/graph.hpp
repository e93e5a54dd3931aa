#pragma once
#include <utility>
#include <vector>

#include "spe/matrix.hpp"

namespace spe {

// Undirected simple graph. Edges are canonical (u < v, sorted, deduplicated);
// adjacency is CSR with sorted neighbor lists. Optional node features are an
// n x d matrix.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> offsets;    // size n+1
  std::vector<int> neighbors;  // size 2m
  Matrix features;             // empty if absent

  int m() const { return int(edges.size()); }
  bool has_features() const { return !features.empty(); }
  int degree(int v) const { return offsets[v + 1] - offsets[v]; }
  bool has_edge(int u, int v) const;
};

// Validates: 1 <= n, no self loops, endpoints in range, feature rows == n.
Graph build_graph(int n, std::vector<std::pair<int, int>> edges, Matrix features = {});

std::vector<int> degrees(const Graph& g);

SymMatrix adjacency_matrix(const Graph& g);

// L = I - D^{-1/2} A D^{-1/2}; every node must have degree >= 1.
SymMatrix normalized_laplacian(const Graph& g);

}  // namespace spe
