#include "spe/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>

#include <json.hpp>

#include "spe/error.hpp"
#include "spe/filters.hpp"
#include "spe/generators.hpp"
#include "spe/graph_io.hpp"
#include "spe/invariants.hpp"

namespace spe {

namespace {

bool min_degree_ok(const Graph& g) {
  for (int d : degrees(g))
    if (d == 0) return false;
  return true;
}

}  // namespace

Graph sample_trial_graph(GraphSampler s, Rng& rng) {
  if (s == GraphSampler::SimpleSpectrum) return gen_path(rng.uniform_int(4, 16));
  if (s == GraphSampler::DegenerateRich) {
    double u = rng.uniform01();
    if (u < 0.40) return gen_cycle(rng.uniform_int(4, 16));
    if (u < 0.62) {
      int side = rng.uniform_int(2, 5);
      return gen_grid(side, side);
    }
    if (u < 0.82) return gen_complete(rng.uniform_int(4, 10));
    for (int attempt = 0; attempt < 1000; ++attempt) {
      Graph g = gen_erdos_renyi(rng.uniform_int(4, 12), rng.uniform(0.3, 0.5), rng.next_u64());
      if (min_degree_ok(g)) return g;
    }
    fail(Err::BadParams, "could not sample a graph without isolated nodes");
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g = gen_erdos_renyi(rng.uniform_int(4, 24), rng.uniform(0.2, 0.6), rng.next_u64());
    if (min_degree_ok(g)) return g;
  }
  fail(Err::BadParams, "could not sample a graph without isolated nodes");
}

SignNetModel sample_signnet(Rng& rng, bool equivariant_only) {
  static const char* kinds[] = {"elementwise-mlp", "deepsets", "gin"};
  SignNetModel m;
  m.phi.kind = kinds[rng.uniform_int(0, 2)];
  m.phi.layers = rng.uniform_int(1, 2);
  m.phi.width = rng.uniform01() < 0.5 ? 8 : 16;
  m.phi.act = rng.uniform01() < 0.5 ? Act::Tanh : Act::Relu;
  m.rho.kind = kinds[rng.uniform_int(0, 2)];
  m.rho.layers = rng.uniform_int(1, 2);
  m.rho.width = rng.uniform01() < 0.5 ? 8 : 16;
  m.rho.act = rng.uniform01() < 0.5 ? Act::Tanh : Act::Relu;
  m.equiv = equivariant_only || rng.uniform01() < 0.75 ? Equivariance::NodeEquivariant
                                                       : Equivariance::Unconstrained;
  m.mode = rng.uniform01() < 0.7 ? SignMode::Sum : SignMode::Concat;
  m.uses_eigvals = rng.uniform01() < 0.5;
  m.uses_features = rng.uniform01() < 0.5;
  m.d_phi = rng.uniform01() < 0.5 ? 4 : 8;
  m.d_out = rng.uniform01() < 0.5 ? 1 : 4;
  m.params.seed = rng.next_u64();
  return m;
}

BasisNetModel sample_basisnet(Rng& rng) {
  BasisNetModel m;
  m.ign_layers = rng.uniform_int(1, 2);
  m.ign_width = rng.uniform01() < 0.5 ? 8 : 16;
  m.act = rng.uniform01() < 0.5 ? Act::Tanh : Act::Relu;
  m.rho.kind = rng.uniform01() < 0.5 ? "deepsets" : "elementwise-mlp";
  m.rho.layers = rng.uniform_int(1, 2);
  m.rho.width = rng.uniform01() < 0.5 ? 8 : 16;
  m.rho.act = rng.uniform01() < 0.5 ? Act::Tanh : Act::Relu;
  m.uses_eigvals = rng.uniform01() < 0.5;
  m.uses_features = rng.uniform01() < 0.5;
  m.d_phi = rng.uniform01() < 0.5 ? 4 : 8;
  m.d_out = rng.uniform01() < 0.5 ? 1 : 4;
  m.params.seed = rng.next_u64();
  return m;
}

std::string invariance_report_json(const InvarianceReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["claim"] = r.claim;
  j["trials"] = r.trials;
  j["tolerance"] = r.tolerance;
  j["max_deviation"] = r.max_deviation;
  j["worst_trial"] = r.worst_trial;
  j["witness"] = {{"graph_seed", r.witness_graph_seed},
                  {"transform_seed", r.witness_transform_seed}};
  j["fraction_degenerate"] = r.fraction_degenerate;
  j["applicable"] = r.applicable;
  j["passed"] = r.passed;
  return j.dump();
}

namespace {

struct TrialSetup {
  Graph g;
  EigDecomp e;
  EigenspacePartition part;
  Matrix x;  // empty unless requested
  uint64_t graph_seed = 0;
  uint64_t transform_seed = 0;
};

TrialSetup make_trial(GraphSampler s, uint64_t seed, int trial, bool want_features) {
  TrialSetup ts;
  ts.graph_seed = Rng::derive(seed, 2 * uint64_t(trial));
  ts.transform_seed = Rng::derive(seed, 2 * uint64_t(trial) + 1);
  Rng grng(ts.graph_seed);
  ts.g = sample_trial_graph(s, grng);
  ts.e = eigh(normalized_laplacian(ts.g));
  ts.part = partition_eigenspaces(ts.e);
  if (want_features) {
    ts.x = Matrix(ts.g.n, 2);
    for (double& v : ts.x.a) v = grng.gaussian();
  }
  return ts;
}

bool has_degenerate(const EigenspacePartition& p) {
  for (const Eigenspace& sp : p.groups)
    if (sp.dim() > 1) return true;
  return false;
}

void record(InvarianceReport& r, int trial, const TrialSetup& ts, double dev, bool degenerate) {
  if (degenerate) r.fraction_degenerate += 1.0;
  if (dev > r.max_deviation || r.worst_trial < 0) {
    r.max_deviation = dev;
    r.worst_trial = trial;
    r.witness_graph_seed = ts.graph_seed;
    r.witness_transform_seed = ts.transform_seed;
  }
}

void finish(InvarianceReport& r) {
  r.fraction_degenerate /= std::max(1, r.trials);
  r.passed = !r.applicable || r.max_deviation <= r.tolerance;
}

// rotate each eigenspace block of columns by its own orthogonal matrix
Matrix rotate_blocks(const Matrix& V, const EigenspacePartition& part, Rng& trng) {
  Matrix out = V;
  int off = 0;
  for (const Eigenspace& sp : part.groups) {
    int d = sp.dim();
    Matrix q = sample_orthogonal(d, trng.next_u64()).q;
    Matrix sub(V.rows, d);
    for (int r = 0; r < V.rows; ++r)
      for (int c = 0; c < d; ++c) sub.at(r, c) = V.at(r, off + c);
    Matrix rot = matmul(sub, q);
    for (int r = 0; r < V.rows; ++r)
      for (int c = 0; c < d; ++c) out.at(r, off + c) = rot.at(r, c);
    off += d;
  }
  return out;
}

Graph permute_graph(const Graph& g, const std::vector<int>& sigma) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.edges.size());
  for (auto [u, v] : g.edges) edges.push_back({sigma[u], sigma[v]});
  Matrix feats = g.has_features() ? permute_rows(g.features, sigma) : Matrix();
  return build_graph(g.n, std::move(edges), std::move(feats));
}

double sign_trial(const SignNetModel& base, const TrialSetup& ts, Rng& trng) {
  SignNetModel m = base;
  if (m.mode == SignMode::Concat) m.k_fixed = ts.g.n;
  const Matrix* xp = m.uses_features ? &ts.x : nullptr;
  Matrix flipped = ts.e.vectors;
  for (int c = 0; c < flipped.cols; ++c)
    if (trng.uniform01() < 0.5)
      for (int r = 0; r < flipped.rows; ++r) flipped.at(r, c) = -flipped.at(r, c);
  Tensor y1 = signnet_forward(m, ts.e.vectors, ts.e.values, xp, &ts.g);
  Tensor y2 = signnet_forward(m, flipped, ts.e.values, xp, &ts.g);
  return max_abs_diff(y1.to_matrix(), y2.to_matrix());
}

double basis_trial_signnet(const SignNetModel& base, const TrialSetup& ts, Rng& trng) {
  SignNetModel m = base;
  if (m.mode == SignMode::Concat) m.k_fixed = ts.g.n;
  const Matrix* xp = m.uses_features ? &ts.x : nullptr;
  Matrix rotated = rotate_blocks(ts.e.vectors, ts.part, trng);
  Tensor y1 = signnet_forward(m, ts.e.vectors, ts.e.values, xp, &ts.g);
  Tensor y2 = signnet_forward(m, rotated, ts.e.values, xp, &ts.g);
  return max_abs_diff(y1.to_matrix(), y2.to_matrix());
}

double basis_trial(const BasisNetModel& m, const TrialSetup& ts, Rng& trng) {
  const Matrix* xp = m.uses_features ? &ts.x : nullptr;
  EigenspacePartition rotated = ts.part;
  for (Eigenspace& sp : rotated.groups)
    sp.basis = matmul(sp.basis, sample_orthogonal(sp.dim(), trng.next_u64()).q);
  Tensor y1 = basisnet_forward(m, ts.part, xp);
  Tensor y2 = basisnet_forward(m, rotated, xp);
  return max_abs_diff(y1.to_matrix(), y2.to_matrix());
}

double perm_trial_signnet(const SignNetModel& base, const TrialSetup& ts, Rng& trng) {
  SignNetModel m = base;
  if (m.mode == SignMode::Concat) m.k_fixed = ts.g.n;
  const Matrix* xp = m.uses_features ? &ts.x : nullptr;
  std::vector<int> sigma = sample_permutation(ts.g.n, trng.next_u64()).perm;
  Graph gp = permute_graph(ts.g, sigma);
  Matrix vp = permute_rows(ts.e.vectors, sigma);
  Matrix xperm;
  const Matrix* xpp = nullptr;
  if (xp) {
    xperm = permute_rows(*xp, sigma);
    xpp = &xperm;
  }
  Matrix y1 = signnet_forward(m, ts.e.vectors, ts.e.values, xp, &ts.g).to_matrix();
  Matrix y2 = signnet_forward(m, vp, ts.e.values, xpp, &gp).to_matrix();
  Matrix want = m.equiv == Equivariance::NodeEquivariant ? permute_rows(y1, sigma) : y1;
  return max_abs_diff(want, y2);
}

double perm_trial_basis(const BasisNetModel& m, const TrialSetup& ts, Rng& trng) {
  const Matrix* xp = m.uses_features ? &ts.x : nullptr;
  std::vector<int> sigma = sample_permutation(ts.part.n, trng.next_u64()).perm;
  EigenspacePartition pp = ts.part;
  for (Eigenspace& sp : pp.groups) sp.basis = permute_rows(sp.basis, sigma);
  Matrix xperm;
  const Matrix* xpp = nullptr;
  if (xp) {
    xperm = permute_rows(*xp, sigma);
    xpp = &xperm;
  }
  Matrix y1 = basisnet_forward(m, ts.part, xp).to_matrix();
  Matrix y2 = basisnet_forward(m, pp, xpp).to_matrix();
  return max_abs_diff(permute_rows(y1, sigma), y2);
}

}  // namespace

InvarianceReport check_sign_invariance(const SignNetModel& m, GraphSampler s, int trials,
                                       uint64_t seed) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "sign", .trials = trials, .tolerance = 1e-6};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, m.uses_features);
    Rng trng(ts.transform_seed);
    record(r, i, ts, sign_trial(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_sign_invariance_random(GraphSampler s, int trials, uint64_t seed,
                                              bool ablate_mirror) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "sign", .trials = trials, .tolerance = 1e-6};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, true);
    Rng trng(ts.transform_seed);
    SignNetModel m = sample_signnet(trng, false);
    if (ablate_mirror) m.mirror = false;
    record(r, i, ts, sign_trial(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_basis_invariance(const BasisNetModel& m, GraphSampler s, int trials,
                                        uint64_t seed) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "basis", .trials = trials, .tolerance = 1e-5};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, m.uses_features);
    Rng trng(ts.transform_seed);
    record(r, i, ts, basis_trial(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_basis_invariance(const SignNetModel& m, GraphSampler s, int trials,
                                        uint64_t seed) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "basis", .trials = trials, .tolerance = 1e-5};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, m.uses_features);
    Rng trng(ts.transform_seed);
    record(r, i, ts, basis_trial_signnet(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_basis_invariance_random(GraphSampler s, int trials, uint64_t seed) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "basis", .trials = trials, .tolerance = 1e-5};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, true);
    Rng trng(ts.transform_seed);
    BasisNetModel m = sample_basisnet(trng);
    record(r, i, ts, basis_trial(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_perm_equivariance(const SignNetModel& m, GraphSampler s, int trials,
                                         uint64_t seed) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "perm", .trials = trials, .tolerance = 1e-6};
  r.applicable = m.equiv == Equivariance::NodeEquivariant;
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, m.uses_features);
    Rng trng(ts.transform_seed);
    record(r, i, ts, perm_trial_signnet(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_perm_equivariance(const BasisNetModel& m, GraphSampler s, int trials,
                                         uint64_t seed) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "perm", .trials = trials, .tolerance = 1e-6};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, m.uses_features);
    Rng trng(ts.transform_seed);
    record(r, i, ts, perm_trial_basis(m, ts, trng), has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

InvarianceReport check_perm_equivariance_random(GraphSampler s, int trials, uint64_t seed,
                                                bool basis_models) {
  check(trials >= 1, Err::BadParams, "trials >= 1");
  InvarianceReport r{.claim = "perm", .trials = trials, .tolerance = 1e-6};
  for (int i = 0; i < trials; ++i) {
    TrialSetup ts = make_trial(s, seed, i, true);
    Rng trng(ts.transform_seed);
    double dev;
    if (basis_models) {
      BasisNetModel m = sample_basisnet(trng);
      dev = perm_trial_basis(m, ts, trng);
    } else {
      SignNetModel m = sample_signnet(trng, true);
      dev = perm_trial_signnet(m, ts, trng);
    }
    record(r, i, ts, dev, has_degenerate(ts.part));
  }
  finish(r);
  return r;
}

// ---- eigenspace statistics ---------------------------------------------

double EigenspaceStats::pct_graphs_degenerate() const {
  return graphs ? 100.0 * graphs_with_degenerate / graphs : 0.0;
}

double EigenspaceStats::pct_vectors_degenerate() const {
  return total_vectors ? 100.0 * double(degenerate_vectors) / double(total_vectors) : 0.0;
}

EigenspaceStats eigenspace_stats(const std::vector<Graph>& gs, double tol_abs, double tol_rel) {
  EigenspaceStats st;
  for (const Graph& g : gs) {
    EigDecomp e;
    try {
      e = eigh(normalized_laplacian(g));
    } catch (const Error& err) {
      if (err.code() == Err::IsolatedNode) {
        ++st.skipped;
        continue;
      }
      throw;
    }
    EigenspacePartition part = partition_eigenspaces(e, tol_abs, tol_rel);
    if (st.graphs == 0) {
      st.n_min = st.n_max = g.n;
    } else {
      st.n_min = std::min(st.n_min, g.n);
      st.n_max = std::max(st.n_max, g.n);
    }
    ++st.graphs;
    bool degenerate = false;
    for (const Eigenspace& sp : part.groups) {
      st.max_multiplicity = std::max(st.max_multiplicity, sp.dim());
      if (sp.dim() > 1) {
        degenerate = true;
        st.degenerate_vectors += sp.dim();
      }
    }
    st.graphs_with_degenerate += degenerate;
    st.total_vectors += g.n;
    st.distinct_values += (long long)part.groups.size();
  }
  return st;
}

EigenspaceStats eigenspace_stats(const Graph& g, double tol_abs, double tol_rel) {
  return eigenspace_stats(std::vector<Graph>{g}, tol_abs, tol_rel);
}

std::string eigenspace_stats_json(const EigenspaceStats& s) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["graphs"] = s.graphs;
  j["skipped"] = s.skipped;
  j["n_min"] = s.n_min;
  j["n_max"] = s.n_max;
  j["max_multiplicity"] = s.max_multiplicity;
  j["graphs_with_degenerate"] = s.graphs_with_degenerate;
  j["pct_graphs_degenerate"] = s.pct_graphs_degenerate();
  j["distinct_values"] = s.distinct_values;
  j["total_vectors"] = s.total_vectors;
  j["degenerate_vectors"] = s.degenerate_vectors;
  j["pct_vectors_degenerate"] = s.pct_vectors_degenerate();
  return j.dump();
}

std::vector<Graph> load_graph_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  check(fs::is_directory(dir), Err::IoError, "not a directory: " + dir);
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    if (ext == ".txt" || ext == ".json") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Graph> gs;
  gs.reserve(paths.size());
  for (const std::string& p : paths) gs.push_back(load_graph(p));
  return gs;
}

// ---- bipartite pair experiment -----------------------------------------

namespace {

// 1-WL refinement starting from degrees; true when some round separates the
// color multisets
bool refinement_distinguishes(const Graph& a, const Graph& b) {
  int n = a.n;
  if (n != b.n) return true;
  std::vector<int> ca = degrees(a), cb = degrees(b);
  for (int round = 0; round < n; ++round) {
    auto msa = ca, msb = cb;
    std::sort(msa.begin(), msa.end());
    std::sort(msb.begin(), msb.end());
    if (msa != msb) return true;
    // joint relabel so colors stay comparable across the two graphs
    std::map<std::vector<int>, int> sig2col;
    auto refine = [&](const Graph& g, const std::vector<int>& col) {
      std::vector<int> out(n);
      for (int v = 0; v < n; ++v) {
        std::vector<int> sig = {col[v]};
        for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) sig.push_back(col[g.neighbors[i]]);
        std::sort(sig.begin() + 1, sig.end());
        auto it = sig2col.emplace(sig, int(sig2col.size()));
        out[v] = it.first->second;
      }
      return out;
    };
    std::vector<int> na = refine(a, ca), nb = refine(b, cb);
    if (na == ca && nb == cb) return false;  // stable and equal multisets
    ca = std::move(na);
    cb = std::move(nb);
  }
  return false;
}

std::vector<double> sorted_column(const Matrix& m) {
  std::vector<double> v(m.a);
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::vector<PairRow> bipartite_pair_experiment(int n_min, int n_max) {
  check(n_min >= 5, Err::BadParams, "pair construction needs n >= 5");
  check(n_max >= n_min, Err::BadParams, "empty range");
  std::vector<FilterSpec> bank = filter_bank();
  std::vector<PairRow> rows;
  for (int n = n_min; n <= n_max; ++n) {
    GraphPair pair = gen_bipartite_pair(n);
    EigDecomp e1 = eigh(normalized_laplacian(pair.g1));
    EigDecomp e2 = eigh(normalized_laplacian(pair.g2));
    PairRow row;
    row.n = n;
    row.lambda_max_g1 = e1.values.back();
    row.lambda_max_g2 = e2.values.back();
    row.separation = row.lambda_max_g2 - row.lambda_max_g1;
    for (const FilterSpec& f : bank) {
      std::vector<double> y1 = sorted_column(spectral_conv(e1, f, pair.g1.features));
      std::vector<double> y2 = sorted_column(spectral_conv(e2, f, pair.g2.features));
      for (size_t i = 0; i < y1.size(); ++i)
        row.max_conv_gap = std::max(row.max_conv_gap, std::fabs(y1[i] - y2[i]));
    }
    row.triangles_g1 = count_cycles_bruteforce(pair.g1).c3;
    row.triangles_g2 = count_cycles_bruteforce(pair.g2).c3;
    row.refinement_distinguishes = refinement_distinguishes(pair.g1, pair.g2);
    row.non_isomorphic = row.triangles_g1 != row.triangles_g2 || row.refinement_distinguishes;
    row.passed = row.max_conv_gap <= 1e-8 && row.separation >= 0.01 &&
                 std::fabs(row.lambda_max_g2 - 2.0) <= 1e-8 && row.non_isomorphic;
    rows.push_back(row);
  }
  return rows;
}

std::string pair_report_json(const std::vector<PairRow>& rows) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  bool all = true;
  for (const PairRow& r : rows) {
    arr.push_back({{"n", r.n},
                   {"lambda_max_g1", r.lambda_max_g1},
                   {"lambda_max_g2", r.lambda_max_g2},
                   {"separation", r.separation},
                   {"max_conv_gap", r.max_conv_gap},
                   {"triangles_g1", r.triangles_g1},
                   {"triangles_g2", r.triangles_g2},
                   {"refinement_distinguishes", r.refinement_distinguishes},
                   {"non_isomorphic", r.non_isomorphic},
                   {"passed", r.passed}});
    all = all && r.passed;
  }
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["rows"] = arr;
  j["all_passed"] = all;
  return j.dump();
}

// ---- filter regression ---------------------------------------------------

namespace {

FilterSpec regression_filter(const std::string& name) {
  if (name == "identity") return filter_poly({1.0});
  return filter_named(name);
}

// heat-smoothed white noise, standardized over nodes
Matrix smooth_signal(const EigDecomp& e, uint64_t seed) {
  int n = e.n();
  Rng rng(Rng::derive(seed, 0x516e41));
  std::vector<double> w(n);
  for (double& v : w) v = rng.gaussian();
  Matrix x(n, 1);
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int r = 0; r < n; ++r) dot += e.vectors.at(r, i) * w[r];
    double gain = std::exp(-3.0 * e.values[i]) * dot;
    for (int r = 0; r < n; ++r) x.at(r, 0) += gain * e.vectors.at(r, i);
  }
  double mean = 0.0;
  for (int r = 0; r < n; ++r) mean += x.at(r, 0);
  mean /= n;
  double var = 0.0;
  for (int r = 0; r < n; ++r) {
    x.at(r, 0) -= mean;
    var += x.at(r, 0) * x.at(r, 0);
  }
  var /= n;
  check(var > 1e-12, Err::BadParams, "degenerate signal");
  double inv = 1.0 / std::sqrt(var);
  for (int r = 0; r < n; ++r) x.at(r, 0) *= inv;
  return x;
}

// nodes at least two rings away from the border
Matrix interior_mask(int h, int w, int* count) {
  Matrix m(h * w, 1);
  *count = 0;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j)
      if (i >= 2 && i < h - 2 && j >= 2 && j < w - 2) {
        m.at(i * w + j, 0) = 1.0;
        ++*count;
      }
  return m;
}

// F[:, j] = sum_i T_j(lambda_i - 1) * v_i (v_i' x); the per-branch invariant
// features of the spectral models, collapsed over branches ahead of training
Matrix chebyshev_features_vectors(const EigDecomp& e, const Matrix& x, int degree) {
  int n = e.n();
  Matrix F(n, degree + 1);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    double dot = 0.0;
    for (int r = 0; r < n; ++r) dot += e.vectors.at(r, i) * x.at(r, 0);
    for (int r = 0; r < n; ++r) u[r] = e.vectors.at(r, i) * dot;
    double lam = e.values[i] - 1.0;
    double tp = 1.0, tc = lam;
    for (int j = 0; j <= degree; ++j) {
      double tj = j == 0 ? 1.0 : (j == 1 ? lam : 2.0 * lam * tc - tp);
      if (j >= 2) {
        tp = tc;
        tc = tj;
      }
      for (int r = 0; r < n; ++r) F.at(r, j) += tj * u[r];
    }
  }
  return F;
}

// same features built from eigenspace projectors: u_g = P_g x
Matrix chebyshev_features_groups(const EigenspacePartition& part, const Matrix& x, int degree) {
  int n = part.n;
  Matrix F(n, degree + 1);
  for (const Eigenspace& sp : part.groups) {
    Matrix coeff = matmul_at_b(sp.basis, x);        // d x 1
    Matrix u = matmul(sp.basis, coeff);             // n x 1
    double lam = sp.mu - 1.0;
    double tp = 1.0, tc = lam;
    for (int j = 0; j <= degree; ++j) {
      double tj = j == 0 ? 1.0 : (j == 1 ? lam : 2.0 * lam * tc - tp);
      if (j >= 2) {
        tp = tc;
        tc = tj;
      }
      for (int r = 0; r < n; ++r) F.at(r, j) += tj * u.at(r, 0);
    }
  }
  return F;
}

double masked_sse(const Matrix& pred, const Matrix& target, const Matrix& mask) {
  double s = 0.0;
  for (int r = 0; r < pred.rows; ++r) {
    double d = (pred.at(r, 0) - target.at(r, 0)) * mask.at(r, 0);
    s += d * d;
  }
  return s;
}

struct TrainOutcome {
  double initial_sse = 0.0;
  double final_sse = 0.0;
};

// full-batch Adam on masked SSE; build_input(epoch) supplies the (possibly
// re-augmented) input matrix, eval uses epoch -1
TrainOutcome train_mlp(ParamSet& ps, const std::string& prefix, int c_in, int width, int layers,
                       const std::function<Matrix(int)>& build_input, const Matrix& target,
                       const Matrix& mask, int epochs, double lr) {
  check(ps.scalar_count() == 0, Err::BadParams, "param set not fresh");
  TrainOutcome out;
  int n = target.rows;
  Matrix first = build_input(-1);
  {
    Tape t(&ps);
    int pred = mlp_stack(t, t.input(Tensor::from_matrix(first)), ps, prefix, c_in, 1, layers,
                         width, Act::Relu);
    out.initial_sse = masked_sse(t.value(pred).to_matrix(), target, mask);
  }
  check(ps.scalar_count() <= 50000, Err::TooLarge, "parameter budget is 50000 scalars");
  Tensor ytgt = Tensor::from_matrix(target);
  Tensor msk = Tensor::from_matrix(mask);
  for (int epoch = 0; epoch < epochs; ++epoch) {
    ps.zero_grads();
    Tape t(&ps);
    int pred = mlp_stack(t, t.input(Tensor::from_matrix(build_input(epoch))), ps, prefix, c_in, 1,
                         layers, width, Act::Relu);
    int res = t.mul(t.sub(pred, t.input(ytgt)), t.input(msk));
    int loss = t.sum_axis(t.mul(res, res), 0);
    t.backward(loss);
    ps.adam_step(lr);
  }
  Tape t(&ps);
  int pred = mlp_stack(t, t.input(Tensor::from_matrix(first)), ps, prefix, c_in, 1, layers, width,
                       Act::Relu);
  out.final_sse = masked_sse(t.value(pred).to_matrix(), target, mask);
  (void)n;
  return out;
}

}  // namespace

std::vector<RegressionResult> filter_regression_experiment(const RegressionConfig& cfg) {
  check(cfg.grid_h >= 5 && cfg.grid_w >= 5, Err::BadParams,
        "grid must be at least 5x5 to have interior nodes");
  check(cfg.grid_h <= 32 && cfg.grid_w <= 32, Err::BadParams, "grid capped at 32x32");
  check(cfg.epochs >= 1, Err::BadParams, "epochs >= 1");
  check(cfg.cheb_degree >= 1 && cfg.cheb_degree <= 64, Err::BadParams, "spectral order in [1,64]");
  bool spectral_model = cfg.model == "signnet-deepsets" || cfg.model == "basisnet";
  bool baseline = cfg.model == "mlp-signflip-baseline" || cfg.model == "mlp-absval-baseline";
  check(spectral_model || baseline, Err::BadParams, "unknown model: " + cfg.model);

  Graph g = gen_grid(cfg.grid_h, cfg.grid_w);
  int n = g.n;
  EigDecomp e = eigh(normalized_laplacian(g));
  Matrix x = smooth_signal(e, cfg.seed);
  int interior = 0;
  Matrix mask = interior_mask(cfg.grid_h, cfg.grid_w, &interior);

  std::vector<RegressionResult> results;
  for (const std::string& fname : cfg.filters) {
    FilterSpec f = regression_filter(fname);
    Matrix target = spectral_conv(e, f, x);

    ParamSet ps;
    ps.seed = Rng::derive(cfg.seed, std::hash<std::string>{}(cfg.model + "|" + fname));
    TrainOutcome tr;
    if (spectral_model) {
      Matrix F = cfg.model == "signnet-deepsets"
                     ? chebyshev_features_vectors(e, x, cfg.cheb_degree)
                     : chebyshev_features_groups(partition_eigenspaces(e), x, cfg.cheb_degree);
      Matrix in(n, F.cols + 1);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < F.cols; ++c) in.at(r, c) = F.at(r, c);
        in.at(r, F.cols) = x.at(r, 0);
      }
      auto build = [&](int) { return in; };
      tr = train_mlp(ps, "rho", in.cols, 16, 2, build, target, mask, cfg.epochs, cfg.lr);
    } else {
      bool absval = cfg.model == "mlp-absval-baseline";
      Rng flips(Rng::derive(cfg.seed, 0xF11b5));
      auto build = [&](int epoch) {
        Matrix in(n, n + 1);
        for (int i = 0; i < n; ++i) {
          double s = 1.0;
          if (!absval && epoch >= 0) s = flips.uniform01() < 0.5 ? -1.0 : 1.0;
          for (int r = 0; r < n; ++r) {
            double v = e.vectors.at(r, i);
            in.at(r, i) = absval ? std::fabs(v) : s * v;
          }
        }
        for (int r = 0; r < n; ++r) in.at(r, n) = x.at(r, 0);
        return in;
      };
      tr = train_mlp(ps, "net", n + 1, cfg.width, 2, build, target, mask, cfg.epochs, cfg.lr);
    }

    RegressionResult res;
    res.filter = fname;
    res.model = cfg.model;
    res.sse = tr.final_sse;
    res.initial_sse = tr.initial_sse;
    res.epochs = cfg.epochs;
    res.interior_nodes = interior;
    res.seed = cfg.seed;
    results.push_back(res);
  }
  return results;
}

std::string regression_results_json(const std::vector<RegressionResult>& rs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RegressionResult& r : rs)
    arr.push_back({{"filter", r.filter},
                   {"model", r.model},
                   {"sse", r.sse},
                   {"initial_sse", r.initial_sse},
                   {"epochs", r.epochs},
                   {"interior_nodes", r.interior_nodes},
                   {"seed", r.seed}});
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["results"] = arr;
  return j.dump();
}

// ---- pca ------------------------------------------------------------------

std::vector<double> pca_top_component(const Matrix& features) {
  check(features.cols >= 1 && features.rows >= 1, Err::BadParams, "empty feature matrix");
  int n = features.rows, d = features.cols;
  Matrix B = features;
  for (int c = 0; c < d; ++c) {
    double mean = 0.0;
    for (int r = 0; r < n; ++r) mean += B.at(r, c);
    mean /= n;
    for (int r = 0; r < n; ++r) B.at(r, c) -= mean;
  }
  std::vector<double> zero(n, 0.0);
  if (max_abs(B) < 1e-300) return zero;

  Matrix C = matmul_at_b(B, B);  // d x d covariance scale
  std::vector<double> w(d);
  double nrm = 0.0;
  for (int j = 0; j < d; ++j) {
    w[j] = 1.0 + 1e-3 * j;  // deterministic, not axis-aligned
    nrm += w[j] * w[j];
  }
  nrm = std::sqrt(nrm);
  for (double& v : w) v /= nrm;

  for (int iter = 0; iter < 10000; ++iter) {
    std::vector<double> next(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) next[i] += C.at(i, j) * w[j];
    double nn = 0.0;
    for (double v : next) nn += v * v;
    nn = std::sqrt(nn);
    if (nn < 1e-300) return zero;
    double dplus = 0.0, dminus = 0.0;
    for (int j = 0; j < d; ++j) {
      next[j] /= nn;
      dplus += (next[j] - w[j]) * (next[j] - w[j]);
      dminus += (next[j] + w[j]) * (next[j] + w[j]);
    }
    w = next;
    if (std::sqrt(std::min(dplus, dminus)) <= 1e-9) break;
  }

  std::vector<double> proj(n, 0.0);
  for (int r = 0; r < n; ++r)
    for (int j = 0; j < d; ++j) proj[r] += B.at(r, j) * w[j];
  int arg = 0;
  for (int r = 1; r < n; ++r)
    if (std::fabs(proj[r]) > std::fabs(proj[arg])) arg = r;
  if (proj[arg] < 0)
    for (double& v : proj) v = -v;
  return proj;
}

}  // namespace spe
