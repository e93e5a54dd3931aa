#include "spe/generators.hpp"

#include <cmath>
#include <string>

#include "spe/error.hpp"
#include "spe/rng.hpp"

namespace spe {

Graph gen_cycle(int n) {
  check(n >= 3, Err::BadParams, "cycle needs n >= 3");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return build_graph(n, std::move(e));
}

Graph gen_path(int n) {
  check(n >= 2, Err::BadParams, "path needs n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return build_graph(n, std::move(e));
}

Graph gen_grid(int h, int w) {
  check(h >= 1 && w >= 1 && h * w >= 2, Err::BadParams, "grid needs h*w >= 2");
  auto id = [w](int r, int c) { return r * w + c; };
  std::vector<std::pair<int, int>> e;
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      if (c + 1 < w) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < h) e.emplace_back(id(r, c), id(r + 1, c));
    }
  return build_graph(h * w, std::move(e));
}

Graph gen_complete(int n) {
  check(n >= 2, Err::BadParams, "complete needs n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return build_graph(n, std::move(e));
}

Graph gen_erdos_renyi(int n, double p, uint64_t seed) {
  check(n >= 1, Err::BadParams, "erdos_renyi needs n >= 1");
  check(p >= 0.0 && p <= 1.0, Err::BadParams, "erdos_renyi needs p in [0,1]");
  Rng rng(seed);
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform01() < p) e.emplace_back(i, j);
  return build_graph(n, std::move(e));
}

static Matrix sqrt_degree_feature(const Graph& g) {
  Matrix x(g.n, 1);
  for (int i = 0; i < g.n; ++i) x.at(i, 0) = std::sqrt(double(g.degree(i)));
  return x;
}

GraphPair gen_bipartite_pair(int n) {
  check(n >= 5, Err::BadParams, "bipartite pair needs n >= 5");

  std::vector<std::pair<int, int>> e1 = {{0, 1}, {1, 2}, {0, 2}, {0, 3}};
  for (int i = 3; i + 1 < n; ++i) e1.emplace_back(i, i + 1);

  // base: left {0,1}, right {2,3,4}, K_{2,3} minus edge 1-4; appended path
  // nodes alternate sides so the graph stays bipartite
  std::vector<std::pair<int, int>> e2 = {{0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}};
  for (int i = 5; i < n; ++i) e2.emplace_back(i - 1, i);

  GraphPair pair;
  pair.g1 = build_graph(n, std::move(e1));
  pair.g2 = build_graph(n, std::move(e2));
  pair.g1.features = sqrt_degree_feature(pair.g1);
  pair.g2.features = sqrt_degree_feature(pair.g2);
  return pair;
}

Graph generate(const std::string& family, int n, int h, int w, double p, uint64_t seed) {
  if (family == "cycle") return gen_cycle(n);
  if (family == "path") return gen_path(n);
  if (family == "grid") return gen_grid(h, w);
  if (family == "complete") return gen_complete(n);
  if (family == "erdos_renyi") return gen_erdos_renyi(n, p, seed);
  fail(Err::BadParams, "unknown graph family: " + family);
}

}  // namespace spe
