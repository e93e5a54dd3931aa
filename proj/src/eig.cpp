#include "spe/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "spe/error.hpp"
#include "spe/kernels.hpp"
#include "spe/rng.hpp"

namespace spe {

namespace {

// Round-robin tournament schedule: m-1 rounds of m/2 disjoint pairs covering
// every pair exactly once. m is n rounded up to even; pairs touching the
// padding index are dropped.
std::vector<std::vector<std::pair<int, int>>> tournament_rounds(int n) {
  int m = (n % 2 == 0) ? n : n + 1;
  std::vector<std::vector<std::pair<int, int>>> rounds;
  if (m < 2) return rounds;
  rounds.reserve(m - 1);
  for (int r = 0; r < m - 1; ++r) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(m / 2);
    auto push = [&](int a, int b) {
      if (a >= n || b >= n) return;
      if (a > b) std::swap(a, b);
      pairs.emplace_back(a, b);
    };
    push(m - 1, r);
    for (int i = 1; i < m / 2; ++i) push((r + i) % (m - 1), (r + m - 1 - i) % (m - 1));
    rounds.push_back(std::move(pairs));
  }
  return rounds;
}

}  // namespace

EigDecomp eigh(const SymMatrix& M) {
  int n = M.n();
  Matrix A = M.m;
  Matrix V = Matrix::identity(n);

  double norm = frob_norm(A);
  double thresh_sq = (1e-12 * norm) * (1e-12 * norm);
  auto rounds = tournament_rounds(n);

  bool converged = (n <= 1) || kern::offdiag_sq(A.data(), n) <= thresh_sq;
  std::vector<kern::Rotation> rot;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    for (auto& round : rounds) {
      rot.clear();
      for (auto [p, q] : round) {
        double apq = A.at(p, q);
        if (apq == 0.0) continue;
        double theta = (A.at(q, q) - A.at(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0) ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                  : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        rot.push_back({p, q, c, t * c});
      }
      if (rot.empty()) continue;
      kern::rotate_rows(A.data(), n, rot.data(), int(rot.size()));
      kern::rotate_cols(A.data(), n, n, rot.data(), int(rot.size()));
      kern::rotate_cols(V.data(), n, n, rot.data(), int(rot.size()));
    }
    converged = kern::offdiag_sq(A.data(), n) <= thresh_sq;
  }
  check(converged, Err::NoConvergence, "Jacobi did not converge in 100 sweeps");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return A.at(a, a) < A.at(b, b); });

  EigDecomp e;
  e.values.resize(n);
  e.vectors = Matrix(n, n);
  for (int j = 0; j < n; ++j) {
    e.values[j] = A.at(order[j], order[j]);
    for (int i = 0; i < n; ++i) e.vectors.at(i, j) = V.at(i, order[j]);
  }
  return e;
}

std::string eig_to_json(const EigDecomp& e) {
  nlohmann::ordered_json j;
  j["values"] = e.values;
  auto rows = nlohmann::ordered_json::array();
  for (int i = 0; i < e.vectors.rows; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < e.vectors.cols; ++c) row.push_back(e.vectors.at(i, c));
    rows.push_back(std::move(row));
  }
  j["vectors"] = std::move(rows);
  return j.dump();
}

EigDecomp eig_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    EigDecomp e;
    e.values = j.at("values").get<std::vector<double>>();
    auto& rows = j.at("vectors");
    int n = int(rows.size());
    check(n == int(e.values.size()), Err::ParseError, "values/vectors size mismatch");
    e.vectors = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
      check(int(rows[i].size()) == n, Err::ParseError, "vectors must be square");
      for (int c = 0; c < n; ++c) e.vectors.at(i, c) = rows[i][c].get<double>();
    }
    return e;
  } catch (const nlohmann::json::exception& ex) {
    fail(Err::ParseError, std::string("bad eig JSON: ") + ex.what());
  }
}

namespace {

// columns of B orthonormalized in place; two passes keep orthogonality near
// machine precision
void mgs_orthonormalize(Matrix& B) {
  int n = B.rows, d = B.cols;
  for (int j = 0; j < d; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) {
        double dot = 0.0;
        for (int r = 0; r < n; ++r) dot += B.at(r, i) * B.at(r, j);
        for (int r = 0; r < n; ++r) B.at(r, j) -= dot * B.at(r, i);
      }
    }
    double nrm = 0.0;
    for (int r = 0; r < n; ++r) nrm += B.at(r, j) * B.at(r, j);
    nrm = std::sqrt(nrm);
    check(nrm > 1e-10, Err::RankDeficient, "degenerate basis column");
    for (int r = 0; r < n; ++r) B.at(r, j) /= nrm;
  }
}

}  // namespace

EigenspacePartition partition_eigenspaces(const EigDecomp& e, double tol_abs, double tol_rel) {
  check(tol_abs >= 0.0 && tol_rel >= 0.0, Err::BadParams, "negative tolerance");
  EigenspacePartition part;
  part.n = e.n();
  part.values = e.values;
  if (part.n == 0) return part;
  part.tau = tol_abs + tol_rel * std::max(1.0, std::fabs(e.values.back()));

  int begin = 0;
  for (int i = 1; i <= part.n; ++i) {
    if (i == part.n || e.values[i] - e.values[i - 1] > part.tau) {
      Eigenspace sp;
      int d = i - begin;
      double sum = 0.0;
      for (int c = begin; c < i; ++c) sum += e.values[c];
      sp.mu = sum / d;
      sp.basis = Matrix(part.n, d);
      for (int r = 0; r < part.n; ++r)
        for (int c = 0; c < d; ++c) sp.basis.at(r, c) = e.vectors.at(r, begin + c);
      mgs_orthonormalize(sp.basis);
      part.groups.push_back(std::move(sp));
      begin = i;
    }
  }
  return part;
}

Matrix projector(const Matrix& V, bool orthonormal) {
  check(V.cols >= 1 && V.rows >= V.cols, Err::ShapeMismatch, "projector basis shape");
  if (orthonormal) return matmul_a_bt(V, V);

  Matrix G = matmul_at_b(V, V);
  EigDecomp ge = eigh(SymMatrix(G));
  double lo = ge.values.front(), hi = ge.values.back();
  check(lo > 0.0 && hi / lo <= 1e12, Err::RankDeficient, "Gram matrix ill-conditioned");
  // G^{-1} = W diag(1/lambda) W'
  int d = G.rows;
  Matrix W_scaled = ge.vectors;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r < d; ++r) W_scaled.at(r, c) /= ge.values[c];
  Matrix Ginv = matmul_a_bt(W_scaled, ge.vectors);
  return matmul_a_bt(matmul(V, Ginv), V);
}

OrthogonalSample sample_orthogonal(int d, uint64_t seed) {
  check(d >= 1, Err::BadParams, "orthogonal sample needs d >= 1");
  Rng rng(seed);
  OrthogonalSample out;
  out.seed = seed;
  out.q = Matrix(d, d);
  for (int j = 0; j < d; ++j) {
    // column-at-a-time MGS; a numerically null column is resampled, which
    // keeps the procedure deterministic
    for (;;) {
      for (int i = 0; i < d; ++i) out.q.at(i, j) = rng.gaussian();
      for (int pass = 0; pass < 2; ++pass)
        for (int prev = 0; prev < j; ++prev) {
          double dot = 0.0;
          for (int i = 0; i < d; ++i) dot += out.q.at(i, prev) * out.q.at(i, j);
          for (int i = 0; i < d; ++i) out.q.at(i, j) -= dot * out.q.at(i, prev);
        }
      double nrm = 0.0;
      for (int i = 0; i < d; ++i) nrm += out.q.at(i, j) * out.q.at(i, j);
      nrm = std::sqrt(nrm);
      if (nrm > 1e-8) {
        for (int i = 0; i < d; ++i) out.q.at(i, j) /= nrm;
        break;
      }
    }
  }
  return out;
}

OrthogonalSample sample_permutation(int n, uint64_t seed) {
  check(n >= 1, Err::BadParams, "permutation sample needs n >= 1");
  Rng rng(seed);
  OrthogonalSample out;
  out.seed = seed;
  out.perm.resize(n);
  std::iota(out.perm.begin(), out.perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(out.perm[i], out.perm[rng.uniform_int(0, i)]);
  out.q = Matrix(n, n);
  for (int i = 0; i < n; ++i) out.q.at(out.perm[i], i) = 1.0;
  return out;
}

Matrix permute_rows(const Matrix& M, const std::vector<int>& sigma) {
  check(int(sigma.size()) == M.rows, Err::ShapeMismatch, "permutation length");
  Matrix out(M.rows, M.cols);
  for (int i = 0; i < M.rows; ++i)
    for (int j = 0; j < M.cols; ++j) out.at(sigma[i], j) = M.at(i, j);
  return out;
}

}  // namespace spe
