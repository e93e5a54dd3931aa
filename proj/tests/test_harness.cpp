#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spe/generators.hpp"
#include "spe/graph_io.hpp"
#include "spe/harness.hpp"
#include "spe/invariants.hpp"

using namespace spe;

TEST_CASE("trial graphs respect their sampler contracts") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    Graph g = sample_trial_graph(GraphSampler::Random, rng);
    CHECK(g.n >= 4);
    CHECK(g.n <= 24);
    for (int v = 0; v < g.n; ++v) CHECK(g.degree(v) >= 1);
  }
  int degenerate = 0;
  for (int i = 0; i < 50; ++i) {
    Graph g = sample_trial_graph(GraphSampler::DegenerateRich, rng);
    EigenspaceStats st = eigenspace_stats(g);
    degenerate += st.graphs_with_degenerate;
  }
  CHECK(degenerate >= 25);  // cycles, grids and complete graphs dominate
  for (int i = 0; i < 20; ++i) {
    Graph g = sample_trial_graph(GraphSampler::SimpleSpectrum, rng);
    EigenspaceStats st = eigenspace_stats(g);
    CHECK(st.max_multiplicity == 1);  // paths have simple spectra
  }
}

TEST_CASE("sign invariance sweep passes and the ablation fails") {
  InvarianceReport r = check_sign_invariance_random(GraphSampler::Random, 40, 7);
  CHECK(r.claim == "sign");
  CHECK(r.trials == 40);
  CHECK(r.passed);
  CHECK(r.max_deviation <= 1e-6);

  InvarianceReport broken = check_sign_invariance_random(GraphSampler::Random, 40, 7, true);
  CHECK_FALSE(broken.passed);
  CHECK(broken.max_deviation > 1e-3);
}

TEST_CASE("basis invariance sweep passes for basisnets") {
  InvarianceReport r = check_basis_invariance_random(GraphSampler::DegenerateRich, 30, 11);
  CHECK(r.claim == "basis");
  CHECK(r.passed);
  CHECK(r.max_deviation <= 1e-5);
  CHECK(r.fraction_degenerate > 0.5);
}

TEST_CASE("signnets fail basis rotations but pass on simple spectra") {
  Rng rng(13);
  SignNetModel m = sample_signnet(rng, true);
  InvarianceReport control = check_basis_invariance(m, GraphSampler::DegenerateRich, 30, 17);
  CHECK_FALSE(control.passed);  // per-column flips cannot track a full rotation

  InvarianceReport simple = check_basis_invariance(m, GraphSampler::SimpleSpectrum, 30, 17);
  CHECK(simple.passed);  // all groups are 1-d, rotation reduces to signs
}

TEST_CASE("permutation equivariance sweeps pass for both families") {
  InvarianceReport sign = check_perm_equivariance_random(GraphSampler::Random, 30, 19);
  CHECK(sign.claim == "perm");
  CHECK(sign.passed);
  CHECK(sign.max_deviation <= 1e-6);
  InvarianceReport basis = check_perm_equivariance_random(GraphSampler::Random, 30, 19, true);
  CHECK(basis.passed);
}

TEST_CASE("unconstrained models report perm as not applicable") {
  SignNetModel m;
  m.equiv = Equivariance::Unconstrained;
  m.params.seed = 3;
  InvarianceReport r = check_perm_equivariance(m, GraphSampler::Random, 10, 23);
  CHECK_FALSE(r.applicable);
  CHECK(r.passed);  // no claim, nothing to fail
}

TEST_CASE("reports replay bit for bit") {
  InvarianceReport a = check_sign_invariance_random(GraphSampler::DegenerateRich, 25, 31);
  InvarianceReport b = check_sign_invariance_random(GraphSampler::DegenerateRich, 25, 31);
  CHECK(invariance_report_json(a) == invariance_report_json(b));
  CHECK(a.worst_trial >= 0);
  CHECK(a.witness_graph_seed == b.witness_graph_seed);
}

TEST_CASE("eigenspace stats of known families") {
  EigenspaceStats c4 = eigenspace_stats(gen_cycle(4));
  CHECK(c4.max_multiplicity == 2);
  CHECK(c4.graphs_with_degenerate == 1);
  CHECK(c4.distinct_values == 3);
  CHECK(c4.total_vectors == 4);
  CHECK(c4.degenerate_vectors == 2);

  std::vector<Graph> paths;
  for (int n = 3; n <= 6; ++n) paths.push_back(gen_path(n));
  EigenspaceStats ps = eigenspace_stats(paths);
  CHECK(ps.graphs == 4);
  CHECK(ps.max_multiplicity == 1);
  CHECK(ps.pct_graphs_degenerate() == 0.0);
  CHECK(ps.pct_vectors_degenerate() == 0.0);
  CHECK(ps.n_min == 3);
  CHECK(ps.n_max == 6);
}

TEST_CASE("stats skip graphs the laplacian rejects") {
  std::vector<Graph> gs;
  gs.push_back(gen_cycle(4));
  gs.push_back(build_graph(3, {{0, 1}}));  // node 2 isolated
  EigenspaceStats st = eigenspace_stats(gs);
  CHECK(st.graphs == 1);
  CHECK(st.skipped == 1);
}

TEST_CASE("graph directory loader sorts by name") {
  std::string dir = "/tmp/spe_dir_test";
  std::filesystem::create_directories(dir);
  write_file(dir + "/b.txt", emit_edge_list(gen_cycle(5)));
  write_file(dir + "/a.txt", emit_edge_list(gen_path(3)));
  write_file(dir + "/c.json", emit_graph_json(gen_complete(4)));
  std::vector<Graph> gs = load_graph_dir(dir);
  REQUIRE(gs.size() == 3);
  CHECK(gs[0].n == 3);
  CHECK(gs[1].n == 5);
  CHECK(gs[2].n == 4);
  std::filesystem::remove_all(dir);
}

TEST_CASE("pair experiment rows hold on the small sizes") {
  std::vector<PairRow> rows = bipartite_pair_experiment(5, 8);
  REQUIRE(rows.size() == 4);
  for (const PairRow& r : rows) {
    CAPTURE(r.n);
    CHECK(r.passed);
    CHECK(r.max_conv_gap <= 1e-8);
    CHECK(r.separation >= 0.01);
    CHECK(std::fabs(r.lambda_max_g2 - 2.0) <= 1e-8);
    CHECK(r.triangles_g1 == 1);
    CHECK(r.triangles_g2 == 0);
    CHECK(r.non_isomorphic);
  }
}

TEST_CASE("identity filter regression fits almost exactly") {
  RegressionConfig cfg;
  cfg.grid_h = 6;
  cfg.grid_w = 6;
  cfg.filters = {"identity"};
  cfg.model = "signnet-deepsets";
  cfg.epochs = 300;
  cfg.seed = 1;
  std::vector<RegressionResult> rs = filter_regression_experiment(cfg);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].interior_nodes == 4);  // two outer rings removed from a 6x6 grid
  CHECK(rs[0].sse < rs[0].initial_sse);
  CHECK(rs[0].sse < 1e-2);  // target is in the feature span
}

TEST_CASE("baseline models run and report the same shape") {
  RegressionConfig cfg;
  cfg.grid_h = 6;
  cfg.grid_w = 6;
  cfg.filters = {"low-pass"};
  cfg.model = "mlp-absval-baseline";
  cfg.epochs = 30;
  cfg.seed = 2;
  std::vector<RegressionResult> rs = filter_regression_experiment(cfg);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].model == "mlp-absval-baseline");
  CHECK(rs[0].epochs == 30);
  CHECK(rs[0].sse >= 0.0);
}

TEST_CASE("pca projects onto the leading direction") {
  // rank-one data: rows of u w' plus a constant offset project onto u
  int n = 12;
  Matrix f(n, 3);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = std::sin(0.7 * i + 0.3);
  double w[3] = {2.0, -1.0, 0.5};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) f.at(i, j) = u[i] * w[j] + 5.0;
  std::vector<double> pc = pca_top_component(f);
  REQUIRE(int(pc.size()) == n);
  // pc must be proportional to centered u
  double um = 0.0;
  for (double v : u) um += v / n;
  int imax = 0;
  for (int i = 0; i < n; ++i)
    if (std::fabs(pc[i]) > std::fabs(pc[imax])) imax = i;
  REQUIRE(std::fabs(pc[imax]) > 1e-9);
  double ratio = (u[imax] - um) / pc[imax];
  for (int i = 0; i < n; ++i) CHECK(std::fabs(pc[i] * ratio - (u[i] - um)) < 1e-6);
  CHECK(pc[imax] > 0.0);  // sign convention

  Matrix constant(5, 2);
  for (double& v : constant.a) v = 3.0;
  std::vector<double> zero = pca_top_component(constant);
  for (double v : zero) CHECK(v == 0.0);

  std::vector<double> again = pca_top_component(f);
  CHECK(again == pc);  // deterministic
}
