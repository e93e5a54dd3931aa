#include "spe/graph.hpp"

#include <algorithm>
#include <cmath>

#include "spe/error.hpp"

namespace spe {

bool Graph::has_edge(int u, int v) const {
  const int* b = neighbors.data() + offsets[u];
  const int* e = neighbors.data() + offsets[u + 1];
  return std::binary_search(b, e, v);
}

Graph build_graph(int n, std::vector<std::pair<int, int>> edges, Matrix features) {
  check(n >= 1, Err::BadParams, "graph needs at least one node");
  for (auto& [u, v] : edges) {
    check(u != v, Err::SelfLoop, "edge " + std::to_string(u) + "-" + std::to_string(v));
    check(u >= 0 && u < n && v >= 0 && v < n, Err::IndexOutOfRange,
          "edge " + std::to_string(u) + "-" + std::to_string(v) + " outside 0.." +
              std::to_string(n - 1));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  if (!features.empty())
    check(features.rows == n, Err::FeatureRowMismatch,
          "feature rows " + std::to_string(features.rows) + " != n " + std::to_string(n));

  Graph g;
  g.n = n;
  g.edges = std::move(edges);
  g.features = std::move(features);
  g.offsets.assign(n + 1, 0);
  for (auto& [u, v] : g.edges) {
    g.offsets[u + 1]++;
    g.offsets[v + 1]++;
  }
  for (int i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
  g.neighbors.resize(g.offsets[n]);
  std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (auto& [u, v] : g.edges) {
    g.neighbors[cursor[u]++] = v;
    g.neighbors[cursor[v]++] = u;
  }
  for (int i = 0; i < n; ++i)
    std::sort(g.neighbors.begin() + g.offsets[i], g.neighbors.begin() + g.offsets[i + 1]);
  return g;
}

std::vector<int> degrees(const Graph& g) {
  std::vector<int> d(g.n);
  for (int i = 0; i < g.n; ++i) d[i] = g.degree(i);
  return d;
}

SymMatrix adjacency_matrix(const Graph& g) {
  Matrix A(g.n, g.n);
  for (auto& [u, v] : g.edges) {
    A.at(u, v) = 1.0;
    A.at(v, u) = 1.0;
  }
  return SymMatrix(std::move(A));
}

SymMatrix normalized_laplacian(const Graph& g) {
  std::vector<int> d = degrees(g);
  for (int i = 0; i < g.n; ++i)
    check(d[i] >= 1, Err::IsolatedNode, "node " + std::to_string(i) + " has degree 0");
  Matrix L(g.n, g.n);
  for (int i = 0; i < g.n; ++i) L.at(i, i) = 1.0;
  for (auto& [u, v] : g.edges) {
    double w = -1.0 / std::sqrt(double(d[u]) * double(d[v]));
    L.at(u, v) = w;
    L.at(v, u) = w;
  }
  return SymMatrix(std::move(L));
}

}  // namespace spe
