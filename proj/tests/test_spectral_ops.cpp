#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spe/encodings.hpp"
#include "spe/error.hpp"
#include "spe/filters.hpp"
#include "spe/generators.hpp"
#include "spe/invariants.hpp"
#include "spe/rng.hpp"

using namespace spe;

namespace {

// independent oracle: exp(M) via Taylor series with scaling and squaring
Matrix taylor_expm(const Matrix& m) {
  int n = m.rows;
  int s = 0;
  double norm = max_abs(m);
  while (norm > 0.5) {
    norm /= 2;
    ++s;
  }
  Matrix scaled = scale(m, std::pow(2.0, -double(s)));
  Matrix acc = Matrix::identity(n), term = Matrix::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = scale(matmul(term, scaled), 1.0 / k);
    acc = add(acc, term);
  }
  for (int i = 0; i < s; ++i) acc = matmul(acc, acc);
  return acc;
}

Matrix matrix_power(const Matrix& m, int k) {
  Matrix acc = Matrix::identity(m.rows);
  for (int i = 0; i < k; ++i) acc = matmul(acc, m);
  return acc;
}

// D^{-1} A by plain loops
Matrix random_walk_matrix(const Graph& g) {
  Matrix a = adjacency_matrix(g).m;
  std::vector<int> d = degrees(g);
  for (int r = 0; r < g.n; ++r)
    for (int c = 0; c < g.n; ++c) a.at(r, c) /= double(d[r]);
  return a;
}

Graph petersen() {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < 5; ++i) {
    edges.push_back({i, (i + 1) % 5});          // outer cycle
    edges.push_back({i, i + 5});                // spokes
    edges.push_back({i + 5, (i + 2) % 5 + 5});  // inner pentagram
  }
  return build_graph(10, edges);
}

Graph connected_er(int n, double p, uint64_t seed) {
  for (uint64_t s = seed;; ++s) {
    Graph g = gen_erdos_renyi(n, p, s);
    if (is_connected_bfs(g)) {
      bool ok = true;
      for (int v = 0; v < n; ++v) ok = ok && g.degree(v) >= 1;
      if (ok) return g;
    }
  }
}

Graph relabel(const Graph& g, const std::vector<int>& sigma) {
  std::vector<std::pair<int, int>> edges;
  for (auto [u, v] : g.edges) edges.push_back({sigma[u], sigma[v]});
  return build_graph(g.n, edges);
}

}  // namespace

TEST_CASE("heat pe on K2 matches the closed form") {
  Graph g = gen_path(2);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix pe = heat_pe(e, {1.0, 2.0});
  double want1 = (1.0 + std::exp(-2.0)) / 2.0;  // spectrum {0, 2}, v^2 = 1/2
  double want2 = (1.0 + std::exp(-4.0)) / 2.0;
  for (int r = 0; r < 2; ++r) {
    CHECK(pe.at(r, 0) == doctest::Approx(want1).epsilon(1e-12));
    CHECK(pe.at(r, 1) == doctest::Approx(want2).epsilon(1e-12));
  }
}

TEST_CASE("heat pe equals the diagonal of a dense matrix exponential") {
  std::vector<double> ts = {0.25, 1.0, 4.0};
  for (uint64_t seed : {1, 2, 3, 4, 5}) {
    Graph g = connected_er(4 + int(seed) * 3, 0.4, seed * 100);
    EigDecomp e = eigh(normalized_laplacian(g));
    Matrix pe = heat_pe(e, ts);
    for (size_t ti = 0; ti < ts.size(); ++ti) {
      Matrix dense = taylor_expm(scale(normalized_laplacian(g).m, -ts[ti]));
      for (int r = 0; r < g.n; ++r) CHECK(std::fabs(pe.at(r, ti) - dense.at(r, r)) < 1e-8);
    }
  }
}

TEST_CASE("rwpe on K2 and C4") {
  Graph k2 = gen_path(2);
  Matrix pe = rwpe(k2, eigh(normalized_laplacian(k2)), {1, 2});
  for (int r = 0; r < 2; ++r) {
    CHECK(std::fabs(pe.at(r, 0)) < 1e-12);        // off-diagonal step
    CHECK(std::fabs(pe.at(r, 1) - 1.0) < 1e-12);  // back in two steps
  }
  Graph c4 = gen_cycle(4);
  Matrix pc = rwpe(c4, eigh(normalized_laplacian(c4)), {2});
  for (int r = 0; r < 4; ++r) CHECK(std::fabs(pc.at(r, 0) - 0.5) < 1e-12);
}

TEST_CASE("rwpe equals the diagonal of dense random-walk powers") {
  for (uint64_t seed : {7, 8, 9}) {
    Graph g = connected_er(10, 0.35, seed * 31);
    EigDecomp e = eigh(normalized_laplacian(g));
    std::vector<int> ks = {1, 2, 3, 5, 8};
    Matrix pe = rwpe(g, e, ks);
    Matrix rw = random_walk_matrix(g);
    for (size_t ki = 0; ki < ks.size(); ++ki) {
      Matrix p = matrix_power(rw, ks[ki]);
      for (int r = 0; r < g.n; ++r) CHECK(std::fabs(pe.at(r, ki) - p.at(r, r)) < 1e-8);
    }
  }
}

TEST_CASE("diffusion kernel equals a dense matrix exponential") {
  Graph g = connected_er(9, 0.4, 77);
  EigDecomp e = eigh(normalized_laplacian(g));
  PEConfig cfg;
  cfg.kind = KernelKind::Diffusion;
  cfg.t = 0.7;
  Matrix got = kernel_matrix(g, e, cfg);
  Matrix want = taylor_expm(scale(normalized_laplacian(g).m, -0.7));
  CHECK(max_abs_diff(got, want) < 1e-8);
}

TEST_CASE("p-step kernel on K2 and against dense powers") {
  Graph k2 = gen_path(2);
  EigDecomp e2 = eigh(normalized_laplacian(k2));
  PEConfig cfg;
  cfg.kind = KernelKind::PStep;
  cfg.gamma = 1.0;
  cfg.p = 1;
  Matrix got = kernel_matrix(k2, e2, cfg);
  CHECK(std::fabs(got.at(0, 0)) < 1e-12);
  CHECK(std::fabs(got.at(0, 1) - 1.0) < 1e-12);
  CHECK(std::fabs(got.at(1, 0) - 1.0) < 1e-12);
  CHECK(std::fabs(got.at(1, 1)) < 1e-12);

  Graph g = connected_er(8, 0.45, 123);
  EigDecomp e = eigh(normalized_laplacian(g));
  cfg.gamma = 0.4;
  cfg.p = 3;
  got = kernel_matrix(g, e, cfg);
  Matrix base = sub(Matrix::identity(g.n), scale(normalized_laplacian(g).m, 0.4));
  CHECK(max_abs_diff(got, matrix_power(base, 3)) < 1e-8);
}

TEST_CASE("gpr and landing kernels live in the random-walk basis") {
  Graph g = connected_er(8, 0.5, 321);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix rw = random_walk_matrix(g);

  PEConfig cfg;
  cfg.kind = KernelKind::Gpr;
  cfg.gammas = {0.5, 0.3, 0.2};
  Matrix got = kernel_matrix(g, e, cfg);
  Matrix want(g.n, g.n);
  for (int k = 0; k < 3; ++k) want = add(want, scale(matrix_power(rw, k), cfg.gammas[k]));
  CHECK(max_abs_diff(got, want) < 1e-8);

  cfg.kind = KernelKind::Landing;
  cfg.k = 4;
  got = kernel_matrix(g, e, cfg);
  CHECK(max_abs_diff(got, matrix_power(rw, 4)) < 1e-8);
}

TEST_CASE("angle table of K4") {
  Graph g = gen_complete(4);
  AngleTable at = graph_angles(partition_eigenspaces(eigh(adjacency_matrix(g))));
  REQUIRE(at.mu.size() == 2);
  CHECK(at.mu[0] == doctest::Approx(-1.0));
  CHECK(at.mu[1] == doctest::Approx(3.0));
  CHECK(at.mult[0] == 3);
  CHECK(at.mult[1] == 1);
  for (int j = 0; j < 4; ++j) {
    CHECK(at.alpha.at(0, j) == doctest::Approx(std::sqrt(3.0) / 2.0));
    CHECK(at.alpha.at(1, j) == doctest::Approx(0.5));
  }
}

TEST_CASE("squared angles sum to one at every node") {
  for (uint64_t seed : {11, 12, 13}) {
    Graph g = connected_er(9, 0.4, seed * 17);
    AngleTable at = graph_angles(partition_eigenspaces(eigh(adjacency_matrix(g))));
    for (int j = 0; j < g.n; ++j) {
      double s = 0.0;
      for (size_t i = 0; i < at.mu.size(); ++i) s += at.alpha.at(int(i), j) * at.alpha.at(int(i), j);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("angle table is permutation invariant up to column relabeling") {
  Graph g = connected_er(8, 0.4, 55);
  AngleTable a1 = graph_angles(partition_eigenspaces(eigh(adjacency_matrix(g))));
  std::vector<int> sigma = sample_permutation(8, 99).perm;
  AngleTable a2 = graph_angles(partition_eigenspaces(eigh(adjacency_matrix(relabel(g, sigma)))));
  REQUIRE(a1.mu.size() == a2.mu.size());
  for (size_t i = 0; i < a1.mu.size(); ++i) {
    CHECK(std::fabs(a1.mu[i] - a2.mu[i]) < 1e-7);
    CHECK(a1.mult[i] == a2.mult[i]);
    for (int j = 0; j < 8; ++j)
      CHECK(std::fabs(a1.alpha.at(int(i), j) - a2.alpha.at(int(i), sigma[j])) < 1e-7);
  }
}

TEST_CASE("closed walk counts match dense adjacency powers") {
  std::vector<Graph> graphs = {gen_cycle(5), gen_complete(4), petersen(),
                               connected_er(8, 0.4, 202)};
  for (const Graph& g : graphs) {
    AngleTable at = graph_angles(partition_eigenspaces(eigh(adjacency_matrix(g))));
    Matrix walks = closed_walk_counts(at, 6);
    for (int k = 1; k <= 6; ++k) {
      std::vector<long long> want = matrix_power_diag(g, k);
      for (int j = 0; j < g.n; ++j) CHECK(std::fabs(walks.at(j, k - 1) - double(want[j])) < 1e-6);
    }
  }
}

TEST_CASE("cycle counts of the standard examples") {
  auto counts = [](const Graph& g) {
    return cycle_counts_from_spectrum(graph_angles(partition_eigenspaces(eigh(adjacency_matrix(g)))));
  };
  CycleCounts k4 = counts(gen_complete(4));
  CHECK(k4.c3 == 4);
  CHECK(k4.c4 == 3);
  CHECK(k4.c5 == 0);
  CycleCounts c5 = counts(gen_cycle(5));
  CHECK(c5.c3 == 0);
  CHECK(c5.c4 == 0);
  CHECK(c5.c5 == 1);
  CycleCounts pet = counts(petersen());
  CHECK(pet.c3 == 0);
  CHECK(pet.c4 == 0);
  CHECK(pet.c5 == 12);
}

TEST_CASE("cycle counts agree with brute force on random graphs") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    Graph g = gen_erdos_renyi(4 + int(seed % 5), 0.5, 1000 + seed);
    CycleCounts want = count_cycles_bruteforce(g);
    CycleCounts got =
        cycle_counts_from_spectrum(graph_angles(partition_eigenspaces(eigh(adjacency_matrix(g)))));
    CHECK(got.c3 == want.c3);
    CHECK(got.c4 == want.c4);
    CHECK(got.c5 == want.c5);
  }
}

TEST_CASE("connectivity and bipartiteness flags match bfs") {
  std::vector<Graph> graphs;
  graphs.push_back(gen_cycle(4));   // connected, bipartite
  graphs.push_back(gen_cycle(5));   // connected, odd
  graphs.push_back(gen_path(6));    // connected, bipartite
  graphs.push_back(gen_complete(5));
  // two disjoint triangles: connected components without isolated nodes
  graphs.push_back(build_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}));
  // disjoint 4-cycles: disconnected and bipartite
  graphs.push_back(build_graph(8, {{0, 1}, {1, 2}, {2, 3}, {0, 3}, {4, 5}, {5, 6}, {6, 7}, {4, 7}}));
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Graph g = gen_erdos_renyi(8, 0.25, 2000 + seed);
    bool ok = true;
    for (int v = 0; v < g.n; ++v) ok = ok && g.degree(v) >= 1;
    if (ok) graphs.push_back(g);
  }
  for (const Graph& g : graphs) {
    EigenspacePartition part = partition_eigenspaces(eigh(normalized_laplacian(g)));
    CHECK(is_connected_spectral(part) == is_connected_bfs(g));
    CHECK(is_bipartite_spectral(part) == is_bipartite_bfs(g));
  }
}

TEST_CASE("named filter values at the anchor points") {
  std::vector<FilterSpec> bank = filter_bank();
  REQUIRE(bank.size() == 5);
  CHECK(bank[0].eval(0.0) == doctest::Approx(1.0));  // low-pass passes dc
  CHECK(bank[0].eval(2.0) < 1e-10);
  CHECK(bank[1].eval(0.0) == doctest::Approx(0.0));  // high-pass blocks dc
  CHECK(bank[1].eval(2.0) == doctest::Approx(1.0));
  CHECK(bank[2].eval(1.0) == doctest::Approx(1.0));  // band-pass peaks mid
  CHECK(bank[3].eval(1.0) == doctest::Approx(0.0));  // band-rejection notches mid
  CHECK(bank[4].eval(0.5) == doctest::Approx(1.0));  // comb |sin(pi lambda)|
  CHECK(bank[4].eval(1.0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(filter_named("sharpen"), Error);
}

TEST_CASE("polynomial filter uses ascending coefficients") {
  FilterSpec f = filter_poly({1.0, -2.0, 0.5});
  CHECK(f.eval(3.0) == doctest::Approx(1.0 - 6.0 + 4.5));
}

TEST_CASE("spectral conv matches a plain dense reconstruction") {
  Rng rng(4242);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = connected_er(6 + trial, 0.4, 3000 + trial);
    EigDecomp e = eigh(normalized_laplacian(g));
    Matrix x(g.n, 2);
    for (double& v : x.a) v = rng.gaussian();
    for (const FilterSpec& f : filter_bank()) {
      Matrix got = spectral_conv(e, f, x);
      // dense: V diag(h(lambda)) V' x
      Matrix want(g.n, x.cols);
      for (int i = 0; i < g.n; ++i) {
        double th = f.eval(e.values[i]);
        for (int c = 0; c < x.cols; ++c) {
          double dot = 0.0;
          for (int r = 0; r < g.n; ++r) dot += e.vectors.at(r, i) * x.at(r, c);
          for (int r = 0; r < g.n; ++r) want.at(r, c) += th * e.vectors.at(r, i) * dot;
        }
      }
      CHECK(max_abs_diff(got, want) < 1e-9);
    }
  }
}

TEST_CASE("free-coefficient filter validates its length") {
  Graph g = gen_cycle(5);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix x(5, 1);
  x.a = {1, 2, 3, 4, 5};
  CHECK_THROWS_AS(spectral_conv(e, filter_free({1.0, 2.0}), x), Error);
  Matrix got = spectral_conv(e, filter_free({1, 1, 1, 1, 1}), x);
  CHECK(max_abs_diff(got, x) < 1e-10);
  CHECK_THROWS_AS(filter_free({}), Error);
}

TEST_CASE("filter json round trip") {
  for (const FilterSpec& f : {filter_named("comb"), filter_heat(0.3), filter_poly({1, 2, 3}),
                              filter_free({0.5, -0.5})}) {
    FilterSpec back = filter_from_json_text(filter_to_json(f));
    CHECK(int(back.kind) == int(f.kind));
    if (f.parametric())
      for (double lam : {0.0, 0.7, 1.9}) CHECK(back.eval(lam) == f.eval(lam));
    else
      CHECK(back.theta == f.theta);
  }
  CHECK_THROWS_AS(filter_from_json_text("{\"kind\":\"wavelet\"}"), Error);
}

TEST_CASE("walk counts need an adjacency partition") {
  // feeding a laplacian partition makes counts non-integral
  Graph g = gen_complete(4);
  AngleTable at = graph_angles(partition_eigenspaces(eigh(normalized_laplacian(g))));
  CHECK_THROWS_AS(cycle_counts_from_spectrum(at), Error);
}
