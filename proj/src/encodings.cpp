#include "spe/encodings.hpp"

#include <cmath>

#include "spe/error.hpp"

namespace spe {

namespace {

// sum_i f(lambda_i) v_i v_i', assembled from the full decomposition
Matrix spectral_function(const EigDecomp& e, const std::vector<double>& f) {
  int n = e.n();
  Matrix scaled = e.vectors;  // columns scaled by f(lambda_i)
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < n; ++r) scaled.at(r, i) *= f[i];
  return matmul_a_bt(scaled, e.vectors);
}

std::vector<double> map_values(const EigDecomp& e, double (*fn)(double, double), double arg) {
  std::vector<double> f(e.n());
  for (int i = 0; i < e.n(); ++i) f[i] = fn(e.values[i], arg);
  return f;
}

}  // namespace

Matrix heat_pe(const EigDecomp& e, const std::vector<double>& ts) {
  check(!ts.empty(), Err::BadParams, "heat_pe needs at least one t");
  int n = e.n();
  Matrix out(n, int(ts.size()));
  for (size_t c = 0; c < ts.size(); ++c) {
    check(ts[c] >= 0.0, Err::BadParams, "heat_pe needs t >= 0");
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double v = e.vectors.at(j, i);
        s += std::exp(-ts[c] * e.values[i]) * v * v;
      }
      out.at(j, int(c)) = s;
    }
  }
  return out;
}

Matrix rwpe(const Graph& g, const EigDecomp& e, const std::vector<int>& ks) {
  check(!ks.empty(), Err::BadParams, "rwpe needs at least one k");
  check(g.n == e.n(), Err::ShapeMismatch, "graph/decomposition size");
  int n = e.n();
  Matrix out(n, int(ks.size()));
  for (size_t c = 0; c < ks.size(); ++c) {
    check(ks[c] >= 1, Err::BadParams, "rwpe needs k >= 1");
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double v = e.vectors.at(j, i);
        s += std::pow(1.0 - e.values[i], double(ks[c])) * v * v;
      }
      out.at(j, int(c)) = s;
    }
  }
  return out;
}

Matrix kernel_matrix(const Graph& g, const EigDecomp& e, const PEConfig& cfg) {
  check(g.n == e.n(), Err::ShapeMismatch, "graph/decomposition size");
  int n = e.n();
  switch (cfg.kind) {
    case KernelKind::Diffusion: {
      check(cfg.t >= 0.0, Err::BadParams, "diffusion needs t >= 0");
      return spectral_function(
          e, map_values(e, [](double l, double t) { return std::exp(-t * l); }, cfg.t));
    }
    case KernelKind::PStep: {
      check(cfg.p >= 1, Err::BadParams, "p-step needs p >= 1");
      check(cfg.gamma > 0.0, Err::BadParams, "p-step needs gamma > 0");
      std::vector<double> f(n);
      for (int i = 0; i < n; ++i) f[i] = std::pow(1.0 - cfg.gamma * e.values[i], double(cfg.p));
      return spectral_function(e, f);
    }
    case KernelKind::Gpr:
    case KernelKind::Landing: {
      std::vector<double> f(n, 0.0);
      if (cfg.kind == KernelKind::Gpr) {
        check(!cfg.gammas.empty(), Err::BadParams, "gpr needs coefficients");
        for (int i = 0; i < n; ++i) {
          double base = 1.0 - e.values[i], pw = 1.0, acc = 0.0;
          for (double gcoef : cfg.gammas) {
            acc += gcoef * pw;
            pw *= base;
          }
          f[i] = acc;
        }
      } else {
        check(cfg.k >= 1, Err::BadParams, "landing needs k >= 1");
        for (int i = 0; i < n; ++i) f[i] = std::pow(1.0 - e.values[i], double(cfg.k));
      }
      // conjugate into the random-walk basis: D^{-1/2} f(L) D^{1/2}
      Matrix sym = spectral_function(e, f);
      std::vector<int> d = degrees(g);
      for (int i = 0; i < n; ++i) {
        check(d[i] >= 1, Err::IsolatedNode, "node " + std::to_string(i));
        for (int j = 0; j < n; ++j)
          sym.at(i, j) *= std::sqrt(double(d[j]) / double(d[i]));
      }
      return sym;
    }
  }
  fail(Err::BadParams, "bad kernel kind");
}

}  // namespace spe
