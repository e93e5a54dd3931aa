#include "spe/models.hpp"

#include <cmath>

#include <json.hpp>

#include "spe/error.hpp"

namespace spe {

namespace {

void check_unit_columns(const Matrix& V) {
  for (int c = 0; c < V.cols; ++c) {
    double s = 0.0;
    for (int r = 0; r < V.rows; ++r) s += V.at(r, c) * V.at(r, c);
    check(std::fabs(std::sqrt(s) - 1.0) <= 1e-6, Err::BadParams,
          "eigenvector column " + std::to_string(c) + " is not unit norm");
  }
}

// branch input: [sign * v_i | lambda_i 1 | X]
Matrix branch_channels(const SignNetModel& m, const Matrix& V, const std::vector<double>& vals,
                       const Matrix* x, int i, double sign) {
  int n = V.rows;
  int c = 1 + (m.uses_eigvals ? 1 : 0) + (m.uses_features ? x->cols : 0);
  Matrix z(n, c);
  for (int r = 0; r < n; ++r) {
    int col = 0;
    z.at(r, col++) = sign * V.at(r, i);
    if (m.uses_eigvals) z.at(r, col++) = vals[i];
    if (m.uses_features)
      for (int j = 0; j < x->cols; ++j) z.at(r, col++) = x->at(r, j);
  }
  return z;
}

int rho_apply(Tape& t, const SignNetModel& m, int h, int c_in, int adj) {
  if (m.rho.kind == "deepsets")
    return deepsets_stack(t, h, 1, m.params, "rho", c_in, m.d_out, m.rho.layers, m.rho.width,
                          m.rho.act);
  if (m.rho.kind == "elementwise-mlp")
    return mlp_stack(t, h, m.params, "rho", c_in, m.d_out, m.rho.layers, m.rho.width, m.rho.act);
  if (m.rho.kind == "gin") {
    check(adj >= 0, Err::GraphRequired, "gin rho needs a graph");
    return gin_stack(t, h, adj, m.params, "rho", c_in, m.d_out, m.rho.layers, m.rho.width,
                     m.rho.act);
  }
  fail(Err::BadParams, "unknown rho kind: " + m.rho.kind);
}

int fixed_conv_build(Tape& t, const SignNetModel& m, const Matrix& V,
                     const std::vector<double>& vals, const Matrix* x) {
  check(x != nullptr && !x->empty(), Err::BadParams, "spectral convolution needs node features");
  int k = V.cols;
  if (!m.has_filter)
    check(int(m.theta.size()) == k, Err::BadParams, "one coefficient per eigenvector required");
  int xin = t.input(Tensor::from_matrix(*x));
  int acc = -1;
  for (int i = 0; i < k; ++i) {
    int v = t.input(Tensor::from_matrix(V.col(i)));
    int plus = t.rank1(v, xin);
    int minus = t.rank1(t.scale(v, -1.0), xin);
    double th = m.has_filter ? m.filter.eval(vals[i]) : m.theta[i];
    int term = t.scale(t.add(plus, minus), 0.5 * th);
    acc = acc < 0 ? term : t.add(acc, term);
  }
  return acc;
}

}  // namespace

int signnet_build(Tape& t, const SignNetModel& m, const Matrix& eigvecs,
                  const std::vector<double>& eigvals, const Matrix* x, const Graph* g) {
  int n = eigvecs.rows, k = eigvecs.cols;
  check(k >= 1, Err::BadParams, "need at least one eigenvector");
  check(int(eigvals.size()) == k, Err::ShapeMismatch, "eigvals size != eigvec columns");
  check_unit_columns(eigvecs);
  if (m.uses_features) {
    check(x != nullptr && !x->empty(), Err::BadParams, "model uses features but none given");
    check(x->rows == n, Err::FeatureRowMismatch, "feature rows");
  }
  if (m.fixed_conv) return fixed_conv_build(t, m, eigvecs, eigvals, x);
  if (m.mode == SignMode::Concat)
    check(m.k_fixed == k, Err::BadParams,
          "fixed-width model expects k = " + std::to_string(m.k_fixed));

  bool needs_graph = m.phi.kind == "gin" || m.rho.kind == "gin";
  if (needs_graph) {
    check(g != nullptr, Err::GraphRequired, "gin block needs the graph");
    check(g->n == n, Err::ShapeMismatch, "graph size != eigenvector rows");
  }

  int c_in = 1 + (m.uses_eigvals ? 1 : 0) + (m.uses_features ? x->cols : 0);
  int adj = -1;
  if (needs_graph) adj = t.input(Tensor::from_matrix(adjacency_matrix(*g).m));

  int merged;  // (k*n, d_phi) equivariant, (k, d_phi) unconstrained
  if (m.equiv == Equivariance::Unconstrained) {
    // flattened-input MLP phi: one row per (sign, branch)
    Matrix Z(2 * k, n * c_in);
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < k; ++i) {
        Matrix z = branch_channels(m, eigvecs, eigvals, x, i, s == 0 ? 1.0 : -1.0);
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < c_in; ++c) Z.at(s * k + i, r * c_in + c) = z.at(r, c);
      }
    int h = mlp_stack(t, t.input(Tensor::from_matrix(Z)), m.params, "phi", n * c_in, m.d_phi,
                      m.phi.layers, m.phi.width, m.phi.act);
    int plus = t.slice(h, 0, 0, k);
    int minus = t.slice(h, 0, k, 2 * k);
    merged = m.mirror ? t.add(plus, minus) : plus;
  } else if (m.phi.kind == "gin") {
    merged = -1;  // per-branch loop, shared parameters
    for (int i = 0; i < k; ++i) {
      int hp = gin_stack(t, t.input(Tensor::from_matrix(branch_channels(m, eigvecs, eigvals, x, i, 1.0))),
                         adj, m.params, "phi", c_in, m.d_phi, m.phi.layers, m.phi.width, m.phi.act);
      int h = hp;
      if (m.mirror) {
        int hm = gin_stack(t, t.input(Tensor::from_matrix(branch_channels(m, eigvecs, eigvals, x, i, -1.0))),
                           adj, m.params, "phi", c_in, m.d_phi, m.phi.layers, m.phi.width,
                           m.phi.act);
        h = t.add(hp, hm);
      }
      merged = merged < 0 ? h : t.concat(merged, h, 0);
    }
  } else {
    // stacked branches share one pass; deepsets means stay per-branch
    Matrix Z(2 * k * n, c_in);
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < k; ++i) {
        Matrix z = branch_channels(m, eigvecs, eigvals, x, i, s == 0 ? 1.0 : -1.0);
        int base = (s * k + i) * n;
        for (int r = 0; r < n; ++r)
          for (int c = 0; c < c_in; ++c) Z.at(base + r, c) = z.at(r, c);
      }
    int zin = t.input(Tensor::from_matrix(Z));
    int h;
    if (m.phi.kind == "deepsets")
      h = deepsets_stack(t, zin, 2 * k, m.params, "phi", c_in, m.d_phi, m.phi.layers, m.phi.width,
                         m.phi.act);
    else if (m.phi.kind == "elementwise-mlp")
      h = mlp_stack(t, zin, m.params, "phi", c_in, m.d_phi, m.phi.layers, m.phi.width, m.phi.act);
    else
      fail(Err::BadParams, "unknown phi kind: " + m.phi.kind);
    int plus = t.slice(h, 0, 0, k * n);
    int minus = t.slice(h, 0, k * n, 2 * k * n);
    merged = m.mirror ? t.add(plus, minus) : plus;
  }

  int rho_in, rho_c;
  if (m.equiv == Equivariance::Unconstrained) {
    if (m.mode == SignMode::Sum) {
      rho_in = t.reshape(t.sum_axis(merged, 0), Shape(1, m.d_phi));
      rho_c = m.d_phi;
    } else {
      rho_in = t.reshape(merged, Shape(1, k * m.d_phi));
      rho_c = k * m.d_phi;
    }
    return mlp_stack(t, rho_in, m.params, "rho", rho_c, m.d_out, m.rho.layers, m.rho.width,
                     m.rho.act);
  }

  if (m.mode == SignMode::Sum) {
    rho_in = t.sum_axis(t.reshape(merged, Shape(k, n, m.d_phi)), 0);
    rho_c = m.d_phi;
  } else {
    rho_in = -1;
    for (int i = 0; i < k; ++i) {
      int block = t.slice(merged, 0, i * n, (i + 1) * n);
      rho_in = rho_in < 0 ? block : t.concat(rho_in, block, 1);
    }
    rho_c = k * m.d_phi;
  }
  return rho_apply(t, m, rho_in, rho_c, adj);
}

Tensor signnet_forward(const SignNetModel& m, const Matrix& eigvecs,
                       const std::vector<double>& eigvals, const Matrix* x, const Graph* g) {
  Tape t(&m.params);
  return t.value(signnet_build(t, m, eigvecs, eigvals, x, g));
}

Matrix signnet_phi_features(const SignNetModel& m, const Matrix& eigvecs,
                            const std::vector<double>& eigvals, const Matrix* x, const Graph* g,
                            int index) {
  check(index >= 0 && index < eigvecs.cols, Err::IndexOutOfRange, "branch index");
  check(!m.fixed_conv, Err::BadParams, "fixed convolution has no learned phi");
  SignNetModel one = m;
  one.mode = SignMode::Sum;  // single branch: sum aggregation is the identity
  one.k_fixed = 0;
  Matrix V = eigvecs.col(index);
  std::vector<double> vals = {eigvals[index]};

  // run phi only: reuse the forward machinery with rho bypassed via a probe
  int n = eigvecs.rows;
  Tape t(&m.params);
  int c_in = 1 + (m.uses_eigvals ? 1 : 0) + (m.uses_features ? x->cols : 0);
  if (m.uses_features) check(x && x->rows == n, Err::FeatureRowMismatch, "feature rows");
  int adj = -1;
  if (m.phi.kind == "gin") {
    check(g != nullptr, Err::GraphRequired, "gin block needs the graph");
    adj = t.input(Tensor::from_matrix(adjacency_matrix(*g).m));
  }

  if (m.equiv == Equivariance::Unconstrained) {
    Matrix Z(2, n * c_in);
    for (int s = 0; s < 2; ++s) {
      Matrix z = branch_channels(one, eigvecs, eigvals, x, index, s == 0 ? 1.0 : -1.0);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < c_in; ++c) Z.at(s, r * c_in + c) = z.at(r, c);
    }
    int h = mlp_stack(t, t.input(Tensor::from_matrix(Z)), m.params, "phi", n * c_in, m.d_phi,
                      m.phi.layers, m.phi.width, m.phi.act);
    int out = t.add(t.slice(h, 0, 0, 1), t.slice(h, 0, 1, 2));
    return t.value(out).to_matrix();
  }

  Matrix zp = branch_channels(one, eigvecs, eigvals, x, index, 1.0);
  Matrix zm = branch_channels(one, eigvecs, eigvals, x, index, -1.0);
  int h;
  if (m.phi.kind == "gin") {
    int hp = gin_stack(t, t.input(Tensor::from_matrix(zp)), adj, m.params, "phi", c_in, m.d_phi,
                       m.phi.layers, m.phi.width, m.phi.act);
    int hm = gin_stack(t, t.input(Tensor::from_matrix(zm)), adj, m.params, "phi", c_in, m.d_phi,
                       m.phi.layers, m.phi.width, m.phi.act);
    h = t.add(hp, hm);
  } else {
    Matrix Z(2 * n, c_in);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < c_in; ++c) {
        Z.at(r, c) = zp.at(r, c);
        Z.at(n + r, c) = zm.at(r, c);
      }
    int zin = t.input(Tensor::from_matrix(Z));
    int s = m.phi.kind == "deepsets"
                ? deepsets_stack(t, zin, 2, m.params, "phi", c_in, m.d_phi, m.phi.layers,
                                 m.phi.width, m.phi.act)
                : mlp_stack(t, zin, m.params, "phi", c_in, m.d_phi, m.phi.layers, m.phi.width,
                            m.phi.act);
    h = t.add(t.slice(s, 0, 0, n), t.slice(s, 0, n, 2 * n));
  }
  return t.value(h).to_matrix();
}

SignNetModel construct_spectral_conv_signnet(std::vector<double> theta) {
  SignNetModel m;
  m.fixed_conv = true;
  m.theta = std::move(theta);
  m.uses_features = true;
  m.uses_eigvals = false;
  m.mode = SignMode::Sum;
  return m;
}

SignNetModel construct_spectral_conv_signnet(const FilterSpec& h) {
  check(h.parametric(), Err::BadParams, "pointwise filter required; free coefficients are "
                                        "supplied per index instead");
  SignNetModel m;
  m.fixed_conv = true;
  m.has_filter = true;
  m.filter = h;
  m.uses_features = true;
  m.uses_eigvals = true;
  m.mode = SignMode::Sum;
  return m;
}

int basisnet_build(Tape& t, const BasisNetModel& m, const EigenspacePartition& part,
                   const Matrix* x) {
  int n = part.n;
  check(!part.groups.empty(), Err::BadParams, "empty partition");
  if (m.uses_features) {
    check(x != nullptr && !x->empty(), Err::BadParams, "model uses features but none given");
    check(x->rows == n, Err::FeatureRowMismatch, "feature rows");
  }
  check(m.rho.kind != "gin", Err::BadParams, "basis rho supports deepsets or elementwise-mlp");

  int acc = -1;
  for (const Eigenspace& sp : part.groups) {
    Matrix P = projector(sp.basis);
    int c = 1 + (m.uses_features ? x->cols : 0);
    Tensor mm(Shape(n, n, c));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        mm.data[(size_t(a) * n + b) * c] = P.at(a, b);
        for (int j = 1; j < c; ++j)
          mm.data[(size_t(a) * n + b) * c + j] = P.at(a, b) * x->at(b, j - 1);
      }
    double mu = sp.mu;
    int h = ign2_m2v_stack(t, mm, m.uses_eigvals ? &mu : nullptr, m.params,
                           "ign_d" + std::to_string(sp.dim()), m.d_phi, m.ign_layers, m.ign_width,
                           m.act);
    acc = acc < 0 ? h : t.add(acc, h);
  }

  int rho_in = acc, rho_c = m.d_phi;
  if (m.uses_features) {
    rho_in = t.concat(acc, t.input(Tensor::from_matrix(*x)), 1);
    rho_c += x->cols;
  }
  return m.rho.kind == "deepsets"
             ? deepsets_stack(t, rho_in, 1, m.params, "rho", rho_c, m.d_out, m.rho.layers,
                              m.rho.width, m.rho.act)
             : mlp_stack(t, rho_in, m.params, "rho", rho_c, m.d_out, m.rho.layers, m.rho.width,
                         m.rho.act);
}

Tensor basisnet_forward(const BasisNetModel& m, const EigenspacePartition& part, const Matrix* x) {
  Tape t(&m.params);
  return t.value(basisnet_build(t, m, part, x));
}

// ---- checkpoints -------------------------------------------------------

namespace {

nlohmann::ordered_json block_to_json(const BlockSpec& b) {
  return {{"kind", b.kind}, {"layers", b.layers}, {"width", b.width}, {"act", act_to_string(b.act)}};
}

BlockSpec block_from_json(const nlohmann::json& j) {
  BlockSpec b;
  b.kind = j.at("kind").get<std::string>();
  b.layers = j.at("layers").get<int>();
  b.width = j.at("width").get<int>();
  b.act = act_from_string(j.at("act").get<std::string>());
  return b;
}

}  // namespace

std::string model_to_json(const SignNetModel& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "signnet";
  j["phi"] = block_to_json(m.phi);
  j["rho"] = block_to_json(m.rho);
  j["mode"] = m.mode == SignMode::Sum ? "sum" : "concat";
  j["equivariance"] = m.equiv == Equivariance::NodeEquivariant ? "node" : "unconstrained";
  j["uses_eigvals"] = m.uses_eigvals;
  j["uses_features"] = m.uses_features;
  j["k_fixed"] = m.k_fixed;
  j["d_phi"] = m.d_phi;
  j["d_out"] = m.d_out;
  j["mirror"] = m.mirror;
  j["fixed_conv"] = m.fixed_conv;
  if (m.fixed_conv) {
    j["theta"] = m.theta;
    j["filter"] = m.has_filter ? nlohmann::ordered_json::parse(filter_to_json(m.filter))
                               : nlohmann::ordered_json(nullptr);
  }
  j["params"] = nlohmann::ordered_json::parse(m.params.to_json_str());
  return j.dump();
}

std::string model_to_json(const BasisNetModel& m) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = "basisnet";
  j["ign_layers"] = m.ign_layers;
  j["ign_width"] = m.ign_width;
  j["act"] = act_to_string(m.act);
  j["rho"] = block_to_json(m.rho);
  j["uses_eigvals"] = m.uses_eigvals;
  j["uses_features"] = m.uses_features;
  j["d_phi"] = m.d_phi;
  j["d_out"] = m.d_out;
  j["params"] = nlohmann::ordered_json::parse(m.params.to_json_str());
  return j.dump();
}

ModelCheckpoint model_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    check(j.value("schema_version", 0) == 1, Err::ParseError, "unsupported checkpoint version");
    ModelCheckpoint ck;
    ck.kind = j.at("kind").get<std::string>();
    if (ck.kind == "signnet") {
      SignNetModel& m = ck.sign;
      m.phi = block_from_json(j.at("phi"));
      m.rho = block_from_json(j.at("rho"));
      m.mode = j.at("mode").get<std::string>() == "sum" ? SignMode::Sum : SignMode::Concat;
      m.equiv = j.at("equivariance").get<std::string>() == "node" ? Equivariance::NodeEquivariant
                                                                  : Equivariance::Unconstrained;
      m.uses_eigvals = j.at("uses_eigvals").get<bool>();
      m.uses_features = j.at("uses_features").get<bool>();
      m.k_fixed = j.at("k_fixed").get<int>();
      m.d_phi = j.at("d_phi").get<int>();
      m.d_out = j.at("d_out").get<int>();
      m.mirror = j.value("mirror", true);
      m.fixed_conv = j.value("fixed_conv", false);
      if (m.fixed_conv) {
        m.theta = j.value("theta", std::vector<double>{});
        if (j.contains("filter") && !j["filter"].is_null()) {
          m.has_filter = true;
          m.filter = filter_from_json_text(j["filter"].dump());
        }
      }
      m.params = ParamSet::from_json_str(j.at("params").dump());
    } else if (ck.kind == "basisnet") {
      BasisNetModel& m = ck.basis;
      m.ign_layers = j.at("ign_layers").get<int>();
      m.ign_width = j.at("ign_width").get<int>();
      m.act = act_from_string(j.at("act").get<std::string>());
      m.rho = block_from_json(j.at("rho"));
      m.uses_eigvals = j.at("uses_eigvals").get<bool>();
      m.uses_features = j.at("uses_features").get<bool>();
      m.d_phi = j.at("d_phi").get<int>();
      m.d_out = j.at("d_out").get<int>();
      m.params = ParamSet::from_json_str(j.at("params").dump());
    } else {
      fail(Err::ParseError, "unknown model kind: " + ck.kind);
    }
    return ck;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::ParseError, std::string("bad checkpoint: ") + e.what());
  }
}

}  // namespace spe
