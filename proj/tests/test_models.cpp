#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spe/blocks.hpp"
#include "spe/error.hpp"
#include "spe/generators.hpp"
#include "spe/models.hpp"
#include "spe/rng.hpp"

using namespace spe;

namespace {

Matrix random_matrix(int r, int c, uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (double& v : m.a) v = rng.gaussian();
  return m;
}

// independent oracle: V diag(theta) V' X by plain loops
Matrix dense_conv(const EigDecomp& e, const std::vector<double>& theta, const Matrix& x) {
  int n = e.n();
  Matrix out(n, x.cols);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < x.cols; ++c) {
      double dot = 0.0;
      for (int r = 0; r < n; ++r) dot += e.vectors.at(r, i) * x.at(r, c);
      for (int r = 0; r < n; ++r) out.at(r, c) += theta[i] * e.vectors.at(r, i) * dot;
    }
  return out;
}

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

Matrix flip_columns(const Matrix& v, const std::vector<int>& cols) {
  Matrix out = v;
  for (int c : cols)
    for (int r = 0; r < out.rows; ++r) out.at(r, c) = -out.at(r, c);
  return out;
}

void set_param(ParamSet& ps, const std::string& name, const std::vector<double>& values) {
  REQUIRE(ps.has(name));
  REQUIRE(ps.at(name).value.data.size() == values.size());
  ps.at(name).value.data = values;
}

}  // namespace

TEST_CASE("signnet is exactly sign invariant for every phi kind") {
  Graph g = gen_cycle(5);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix x = random_matrix(5, 2, 1);
  for (std::string kind : {"elementwise-mlp", "deepsets", "gin"}) {
    CAPTURE(kind);
    SignNetModel m;
    m.phi.kind = kind;
    m.rho.kind = "deepsets";
    m.uses_eigvals = true;
    m.uses_features = true;
    m.params.seed = 42;
    Tensor y1 = signnet_forward(m, e.vectors, e.values, &x, &g);
    Tensor y2 = signnet_forward(m, flip_columns(e.vectors, {0, 2, 3}), e.values, &x, &g);
    CHECK(y1.shape == Shape(5, m.d_out));
    CHECK(max_abs_diff(y1.to_matrix(), y2.to_matrix()) == 0.0);  // the mirror sum commutes
  }
}

TEST_CASE("dropping the mirror term breaks sign invariance") {
  Graph g = gen_cycle(6);
  EigDecomp e = eigh(normalized_laplacian(g));
  SignNetModel m;
  m.mirror = false;
  m.params.seed = 7;
  Tensor y1 = signnet_forward(m, e.vectors, e.values, nullptr, &g);
  Tensor y2 = signnet_forward(m, flip_columns(e.vectors, {1, 4}), e.values, nullptr, &g);
  CHECK(max_abs_diff(y1.to_matrix(), y2.to_matrix()) > 1e-3);
}

TEST_CASE("concat mode pins k and widens rho input") {
  Graph g = gen_cycle(5);
  EigDecomp e = eigh(normalized_laplacian(g));
  SignNetModel m;
  m.mode = SignMode::Concat;
  m.k_fixed = 5;
  m.params.seed = 3;
  Tensor y = signnet_forward(m, e.vectors, e.values, nullptr, &g);
  CHECK(y.shape == Shape(5, m.d_out));
  m.k_fixed = 4;
  CHECK_THROWS_AS(signnet_forward(m, e.vectors, e.values, nullptr, &g), Error);
}

TEST_CASE("unconstrained mode pools to one row and stays sign invariant") {
  Graph g = gen_cycle(5);
  EigDecomp e = eigh(normalized_laplacian(g));
  SignNetModel m;
  m.equiv = Equivariance::Unconstrained;
  m.params.seed = 11;
  Tensor y1 = signnet_forward(m, e.vectors, e.values, nullptr, &g);
  CHECK(y1.shape == Shape(1, m.d_out));
  Tensor y2 = signnet_forward(m, flip_columns(e.vectors, {0, 1, 2, 3, 4}), e.values, nullptr, &g);
  CHECK(max_abs_diff(y1.to_matrix(), y2.to_matrix()) == 0.0);
}

TEST_CASE("eigenvector columns must be unit norm") {
  Graph g = gen_cycle(4);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix bad = e.vectors;
  for (int r = 0; r < 4; ++r) bad.at(r, 1) *= 2.0;
  SignNetModel m;
  CHECK_THROWS_AS(signnet_forward(m, bad, e.values, nullptr, &g), Error);
}

TEST_CASE("theta = all ones with full k reproduces the features") {
  Graph g = gen_cycle(6);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix x = random_matrix(6, 3, 4);
  SignNetModel m = construct_spectral_conv_signnet(std::vector<double>(6, 1.0));
  Tensor y = signnet_forward(m, e.vectors, e.values, &x, &g);
  CHECK(max_abs_diff(y.to_matrix(), x) < 1e-10);  // V V' = I at full rank
}

TEST_CASE("constructed conv matches the dense oracle on C4") {
  Graph g = gen_cycle(4);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix x = random_matrix(4, 2, 5);
  std::vector<double> theta = {0.0, 1.0, 0.0, 0.0};  // indicator
  SignNetModel m = construct_spectral_conv_signnet(theta);
  Tensor y = signnet_forward(m, e.vectors, e.values, &x, &g);
  CHECK(max_abs_diff(y.to_matrix(), dense_conv(e, theta, x)) < 1e-10);
  // wrong theta length is rejected
  SignNetModel bad = construct_spectral_conv_signnet(std::vector<double>{1.0});
  CHECK_THROWS_AS(signnet_forward(bad, e.vectors, e.values, &x, &g), Error);
}

TEST_CASE("heat filter conv on K4 matches a taylor matrix exponential") {
  Graph g = gen_complete(4);
  SymMatrix L = normalized_laplacian(g);
  EigDecomp e = eigh(L);
  Matrix x = random_matrix(4, 2, 6);
  SignNetModel m = construct_spectral_conv_signnet(filter_heat(1.0));
  Tensor y = signnet_forward(m, e.vectors, e.values, &x, &g);
  Matrix want = matmul(taylor_expm(scale(L.m, -1.0)), x);
  CHECK(max_abs_diff(y.to_matrix(), want) < 1e-9);
}

TEST_CASE("deepsets layer with identity weights is the identity") {
  ParamSet ps(1);
  Matrix x = random_matrix(5, 3, 7);
  Tape t(&ps);
  int h = deepsets_stack(t, t.input(Tensor::from_matrix(x)), 1, ps, "d", 3, 3, 1, 3, Act::Tanh);
  std::vector<double> eye = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  set_param(ps, "d.l0.w1", eye);
  set_param(ps, "d.l0.w2", std::vector<double>(9, 0.0));
  set_param(ps, "d.l0.b", {0.0, 0.0, 0.0});
  Tape t2(&ps);
  int h2 = deepsets_stack(t2, t2.input(Tensor::from_matrix(x)), 1, ps, "d", 3, 3, 1, 3, Act::Tanh);
  CHECK(max_abs_diff(t2.value(h2).to_matrix(), x) == 0.0);
  (void)h;
}

TEST_CASE("deepsets layer maps constant rows to constant rows") {
  ParamSet ps(2);
  Matrix x(4, 2);
  for (int r = 0; r < 4; ++r) {
    x.at(r, 0) = 0.3;
    x.at(r, 1) = -1.2;
  }
  Tape t(&ps);
  int h = deepsets_stack(t, t.input(Tensor::from_matrix(x)), 1, ps, "d", 2, 5, 2, 6, Act::Tanh);
  Matrix out = t.value(h).to_matrix();
  for (int r = 1; r < 4; ++r)
    for (int c = 0; c < 5; ++c) CHECK(out.at(r, c) == out.at(0, c));
}

TEST_CASE("gin layer with identity weights computes h + Ah") {
  Graph g = gen_path(2);  // K2
  ParamSet ps(3);
  Matrix h0(2, 1);
  h0.a = {1.0, 0.0};
  Tape t(&ps);
  int adj = t.input(Tensor::from_matrix(adjacency_matrix(g).m));
  int h = gin_stack(t, t.input(Tensor::from_matrix(h0)), adj, ps, "g", 1, 1, 1, 1, Act::Relu);
  set_param(ps, "g.l0.m0.w", {1.0});
  set_param(ps, "g.l0.m0.b", {0.0});
  set_param(ps, "g.l0.m1.w", {1.0});
  set_param(ps, "g.l0.m1.b", {0.0});
  Tape t2(&ps);
  adj = t2.input(Tensor::from_matrix(adjacency_matrix(g).m));
  h = gin_stack(t2, t2.input(Tensor::from_matrix(h0)), adj, ps, "g", 1, 1, 1, 1, Act::Relu);
  Matrix out = t2.value(h).to_matrix();
  CHECK(out.at(0, 0) == 1.0);
  CHECK(out.at(1, 0) == 1.0);
}

TEST_CASE("ign2 features of the identity matrix") {
  Tensor m(Shape(4, 4));
  for (int i = 0; i < 4; ++i) m.data[i * 4 + i] = 1.0;
  Matrix f = ign2_features(m);
  for (int j = 0; j < 4; ++j) {
    CHECK(f.at(j, 0) == 1.0);                         // diag
    CHECK(f.at(j, 1) == doctest::Approx(0.25));       // rowsum / n
    CHECK(f.at(j, 2) == doctest::Approx(0.25));       // colsum / n
    CHECK(f.at(j, 3) == doctest::Approx(4.0 / 16.0)); // total / n^2
    CHECK(f.at(j, 4) == doctest::Approx(1.0));        // trace / n
  }
}

TEST_CASE("ign2 on a symmetric constant matrix gives identical rows") {
  int n = 5;
  Tensor m(Shape(n, n));
  for (double& v : m.data) v = 1.0 / n;
  Matrix f = ign2_features(m);
  for (int r = 1; r < n; ++r)
    for (int c = 0; c < 5; ++c) CHECK(f.at(r, c) == f.at(0, c));
}

TEST_CASE("basisnet configured to pick the diagonal returns diag(VV')") {
  // one eigenspace, mix picks the diag feature, rho is identity
  EigenspacePartition part;
  part.n = 4;
  Eigenspace sp;
  sp.mu = 0.7;
  sp.basis = Matrix(4, 2);
  sp.basis.at(0, 0) = 1.0;
  sp.basis.at(1, 1) = 1.0 / std::sqrt(2.0);
  sp.basis.at(2, 1) = 1.0 / std::sqrt(2.0);
  part.groups.push_back(sp);

  BasisNetModel m;
  m.ign_layers = 1;
  m.act = Act::Relu;
  m.rho.kind = "deepsets";
  m.rho.layers = 1;
  m.uses_eigvals = false;
  m.d_phi = 1;
  m.d_out = 1;
  m.params.seed = 9;
  basisnet_forward(m, part, nullptr);  // instantiate parameters
  set_param(m.params, "ign_d2.mix.w", {1, 0, 0, 0, 0});
  set_param(m.params, "ign_d2.mix.b", {0.0});
  set_param(m.params, "rho.l0.w1", {1.0});
  set_param(m.params, "rho.l0.w2", {0.0});
  set_param(m.params, "rho.l0.b", {0.0});
  Matrix out = basisnet_forward(m, part, nullptr).to_matrix();
  CHECK(out.at(0, 0) == doctest::Approx(1.0));
  CHECK(out.at(1, 0) == doctest::Approx(0.5));
  CHECK(out.at(2, 0) == doctest::Approx(0.5));
  CHECK(out.at(3, 0) == doctest::Approx(0.0));
}

TEST_CASE("basisnet shares parameters across equal-dimension eigenspaces") {
  Graph g = gen_grid(3, 3);  // several multiplicity-2 spaces
  EigDecomp e = eigh(normalized_laplacian(g));
  EigenspacePartition part = partition_eigenspaces(e);
  int multi = 0;
  for (const Eigenspace& sp : part.groups) multi += sp.dim() == 2;
  REQUIRE(multi >= 2);
  BasisNetModel m;
  m.params.seed = 13;
  basisnet_forward(m, part, nullptr);
  int mix_blocks = 0;
  for (const auto& [name, p] : m.params.items)
    if (name.find(".mix.w") != std::string::npos) ++mix_blocks;
  // one mix block per distinct dimension, not per group
  std::vector<int> dims;
  for (const Eigenspace& sp : part.groups)
    if (std::find(dims.begin(), dims.end(), sp.dim()) == dims.end()) dims.push_back(sp.dim());
  CHECK(mix_blocks == int(dims.size()));
}

TEST_CASE("basisnet is invariant to an in-space rotation") {
  Graph g = gen_cycle(6);
  EigDecomp e = eigh(normalized_laplacian(g));
  EigenspacePartition part = partition_eigenspaces(e);
  Matrix x = random_matrix(6, 2, 8);
  BasisNetModel m;
  m.uses_features = true;
  m.uses_eigvals = true;
  m.params.seed = 17;
  EigenspacePartition rotated = part;
  for (Eigenspace& sp : rotated.groups)
    sp.basis = matmul(sp.basis, sample_orthogonal(sp.dim(), 99).q);
  Tensor y1 = basisnet_forward(m, part, &x);
  Tensor y2 = basisnet_forward(m, rotated, &x);
  CHECK(y1.shape == Shape(6, m.d_out));
  CHECK(max_abs_diff(y1.to_matrix(), y2.to_matrix()) < 1e-5);
}

TEST_CASE("signnet checkpoint round trip preserves the forward pass") {
  Graph g = gen_cycle(5);
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix x = random_matrix(5, 2, 9);
  SignNetModel m;
  m.uses_features = true;
  m.mode = SignMode::Concat;
  m.k_fixed = 5;
  m.params.seed = 21;
  Matrix before = signnet_forward(m, e.vectors, e.values, &x, &g).to_matrix();
  ModelCheckpoint ck = model_from_json(model_to_json(m));
  REQUIRE(ck.kind == "signnet");
  Matrix after = signnet_forward(ck.sign, e.vectors, e.values, &x, &g).to_matrix();
  CHECK(before.a == after.a);
}

TEST_CASE("basisnet checkpoint round trip preserves the forward pass") {
  Graph g = gen_cycle(6);
  EigDecomp e = eigh(normalized_laplacian(g));
  EigenspacePartition part = partition_eigenspaces(e);
  BasisNetModel m;
  m.params.seed = 23;
  Matrix before = basisnet_forward(m, part, nullptr).to_matrix();
  ModelCheckpoint ck = model_from_json(model_to_json(m));
  REQUIRE(ck.kind == "basisnet");
  Matrix after = basisnet_forward(ck.basis, part, nullptr).to_matrix();
  CHECK(before.a == after.a);
}

TEST_CASE("fixed-conv checkpoint keeps the filter") {
  SignNetModel m = construct_spectral_conv_signnet(filter_heat(0.5));
  ModelCheckpoint ck = model_from_json(model_to_json(m));
  CHECK(ck.sign.fixed_conv);
  CHECK(ck.sign.has_filter);
  CHECK(ck.sign.filter.eval(1.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("checkpoint parser rejects garbage") {
  CHECK_THROWS_AS(model_from_json("{}"), Error);
  CHECK_THROWS_AS(model_from_json("not json"), Error);
  CHECK_THROWS_AS(model_from_json("{\"schema_version\":1,\"kind\":\"vae\"}"), Error);
}

TEST_CASE("phi features are sign invariant per branch") {
  Graph g = gen_cycle(5);
  EigDecomp e = eigh(normalized_laplacian(g));
  SignNetModel m;
  m.params.seed = 29;
  Matrix f1 = signnet_phi_features(m, e.vectors, e.values, nullptr, &g, 2);
  Matrix f2 = signnet_phi_features(m, flip_columns(e.vectors, {2}), e.values, nullptr, &g, 2);
  CHECK(f1.rows == 5);
  CHECK(f1.cols == m.d_phi);
  CHECK(max_abs_diff(f1, f2) == 0.0);
}
