#include "spe/blocks.hpp"

#include "spe/error.hpp"

namespace spe {

Act act_from_string(const std::string& s) {
  if (s == "relu") return Act::Relu;
  if (s == "tanh") return Act::Tanh;
  fail(Err::BadParams, "unknown activation: " + s);
}

std::string act_to_string(Act a) { return a == Act::Relu ? "relu" : "tanh"; }

int apply_act(Tape& t, int h, Act act) { return act == Act::Relu ? t.relu(h) : t.tanh(h); }

int bias_add(Tape& t, int h, ParamSet& ps, const std::string& name, int rows, int width) {
  // Biases start small but nonzero: with all-zero biases a tanh stack is an
  // odd function, so the mirrored sum phi(v) + phi(-v) collapses to zero and
  // a freshly initialized model degenerates to a constant.
  ps.declare(name, Shape(1, width), Init::GaussianSmall);
  Tensor ones(Shape(rows, 1));
  std::fill(ones.data.begin(), ones.data.end(), 1.0);
  return t.add(h, t.matmul(t.input(std::move(ones)), t.param(name)));
}

namespace {

// c_in -> width -> ... -> c_out across `layers` weight layers
int layer_dims(int layer, int layers, int c_in, int c_out, int width, bool out_side) {
  if (!out_side) return layer == 0 ? c_in : width;
  return layer == layers - 1 ? c_out : width;
}

}  // namespace

int mlp_stack(Tape& t, int h, ParamSet& ps, const std::string& prefix, int c_in, int c_out,
              int layers, int width, Act act) {
  check(layers >= 1, Err::BadParams, "mlp needs >= 1 layer");
  int rows = t.value(h).shape.d[0];
  for (int l = 0; l < layers; ++l) {
    int ci = layer_dims(l, layers, c_in, c_out, width, false);
    int co = layer_dims(l, layers, c_in, c_out, width, true);
    std::string lp = prefix + ".l" + std::to_string(l);
    ps.declare(lp + ".w", Shape(ci, co), Init::GaussianFanIn, ci);
    h = t.matmul(h, t.param(lp + ".w"));
    h = bias_add(t, h, ps, lp + ".b", rows, co);
    if (l + 1 < layers) h = apply_act(t, h, act);
  }
  return h;
}

int deepsets_stack(Tape& t, int h, int batch, ParamSet& ps, const std::string& prefix, int c_in,
                   int c_out, int layers, int width, Act act) {
  check(layers >= 1, Err::BadParams, "deepsets needs >= 1 layer");
  int rows = t.value(h).shape.d[0];
  check(batch >= 1 && rows % batch == 0, Err::ShapeMismatch, "deepsets batch");
  int per = rows / batch;
  for (int l = 0; l < layers; ++l) {
    int ci = layer_dims(l, layers, c_in, c_out, width, false);
    int co = layer_dims(l, layers, c_in, c_out, width, true);
    std::string lp = prefix + ".l" + std::to_string(l);
    ps.declare(lp + ".w1", Shape(ci, co), Init::GaussianFanIn, ci);
    ps.declare(lp + ".w2", Shape(ci, co), Init::GaussianFanIn, ci);
    int mean = h;
    if (batch > 1) {
      mean = t.reshape(h, Shape(batch, per, ci));
      mean = t.mean_nodes(mean);
      mean = t.reshape(mean, Shape(rows, ci));
    } else {
      mean = t.mean_nodes(h);
    }
    int mixed = t.add(t.matmul(h, t.param(lp + ".w1")), t.matmul(mean, t.param(lp + ".w2")));
    h = bias_add(t, mixed, ps, lp + ".b", rows, co);
    if (l + 1 < layers) h = apply_act(t, h, act);
  }
  return h;
}

int gin_stack(Tape& t, int h, int adj, ParamSet& ps, const std::string& prefix, int c_in,
              int c_out, int layers, int width, Act act) {
  check(layers >= 1, Err::BadParams, "gin needs >= 1 layer");
  int rows = t.value(h).shape.d[0];
  check(t.value(adj).shape == Shape(rows, rows), Err::ShapeMismatch, "gin adjacency shape");
  for (int l = 0; l < layers; ++l) {
    int ci = layer_dims(l, layers, c_in, c_out, width, false);
    int co = layer_dims(l, layers, c_in, c_out, width, true);
    std::string lp = prefix + ".l" + std::to_string(l);
    // eps = 0: aggregate = h + A h
    int agg = t.add(h, t.matmul(adj, h));
    ps.declare(lp + ".m0.w", Shape(ci, width), Init::GaussianFanIn, ci);
    int z = t.matmul(agg, t.param(lp + ".m0.w"));
    z = bias_add(t, z, ps, lp + ".m0.b", rows, width);
    z = apply_act(t, z, act);
    ps.declare(lp + ".m1.w", Shape(width, co), Init::GaussianFanIn, width);
    z = t.matmul(z, t.param(lp + ".m1.w"));
    h = bias_add(t, z, ps, lp + ".m1.b", rows, co);
    if (l + 1 < layers) h = apply_act(t, h, act);
  }
  return h;
}

Matrix ign2_features(const Tensor& m) {
  check(m.shape.nd == 2 || m.shape.nd == 3, Err::ShapeMismatch, "ign2 input must be (n,n[,c])");
  int n = m.shape.d[0];
  check(m.shape.d[1] == n, Err::NotSquare, "ign2 input must be square");
  int c = m.shape.nd == 3 ? m.shape.d[2] : 1;
  Matrix f(n, 5 * c);
  for (int ch = 0; ch < c; ++ch) {
    auto at = [&](int i, int j) { return m.data[(size_t(i) * n + j) * c + ch]; };
    double total = 0.0, trace = 0.0;
    for (int i = 0; i < n; ++i) {
      trace += at(i, i);
      for (int j = 0; j < n; ++j) total += at(i, j);
    }
    for (int j = 0; j < n; ++j) {
      double row = 0.0, col = 0.0;
      for (int k = 0; k < n; ++k) {
        row += at(j, k);
        col += at(k, j);
      }
      f.at(j, 5 * ch + 0) = at(j, j);
      f.at(j, 5 * ch + 1) = row / n;
      f.at(j, 5 * ch + 2) = col / n;
      f.at(j, 5 * ch + 3) = total / (double(n) * n);
      f.at(j, 5 * ch + 4) = trace / n;
    }
  }
  return f;
}

int ign2_m2v_stack(Tape& t, const Tensor& m, const double* mu, ParamSet& ps,
                   const std::string& prefix, int c_out, int layers, int width, Act act) {
  check(layers >= 1, Err::BadParams, "ign2 needs >= 1 layer");
  Matrix feats = ign2_features(m);
  int n = feats.rows;
  int c = feats.cols + (mu ? 1 : 0);
  Matrix in(n, c);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < feats.cols; ++j) in.at(i, j) = feats.at(i, j);
    if (mu) in.at(i, feats.cols) = *mu;
  }
  int h = t.input(Tensor::from_matrix(in));
  int co = layers == 1 ? c_out : width;
  ps.declare(prefix + ".mix.w", Shape(c, co), Init::GaussianFanIn, c);
  h = t.matmul(h, t.param(prefix + ".mix.w"));
  h = bias_add(t, h, ps, prefix + ".mix.b", n, co);
  h = apply_act(t, h, act);
  if (layers > 1) h = deepsets_stack(t, h, 1, ps, prefix + ".ds", width, c_out, layers - 1, width, act);
  return h;
}

}  // namespace spe
