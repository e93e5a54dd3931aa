#include "spe/invariants.hpp"

#include <cmath>
#include <queue>

#include "spe/error.hpp"

namespace spe {

AngleTable graph_angles(const EigenspacePartition& part) {
  AngleTable at;
  int l = int(part.groups.size());
  at.mu.resize(l);
  at.mult.resize(l);
  at.alpha = Matrix(l, part.n);
  for (int i = 0; i < l; ++i) {
    const Eigenspace& sp = part.groups[i];
    at.mu[i] = sp.mu;
    at.mult[i] = sp.dim();
    // || P_i e_j || is just the j-th row norm of the orthonormal basis
    for (int j = 0; j < part.n; ++j) {
      double s = 0.0;
      for (int c = 0; c < sp.dim(); ++c) s += sp.basis.at(j, c) * sp.basis.at(j, c);
      at.alpha.at(i, j) = std::sqrt(s);
    }
  }
  return at;
}

Matrix closed_walk_counts(const AngleTable& at, int kmax) {
  check(kmax >= 1, Err::BadParams, "kmax >= 1");
  int l = int(at.mu.size()), n = at.alpha.cols;
  Matrix W(n, kmax);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < l; ++i) {
      double a2 = at.alpha.at(i, j) * at.alpha.at(i, j);
      double p = 1.0;
      for (int k = 1; k <= kmax; ++k) {
        p *= at.mu[i];
        W.at(j, k - 1) += p * a2;
      }
    }
  }
  return W;
}

namespace {

long long round_checked(double raw, const char* what) {
  double r = std::nearbyint(raw);
  check(std::fabs(raw - r) <= 1e-6, Err::NonInteger,
        std::string(what) + " = " + std::to_string(raw));
  return (long long)r;
}

}  // namespace

CycleCounts cycle_counts_from_spectrum(const AngleTable& at) {
  int n = at.alpha.cols;
  Matrix W = closed_walk_counts(at, 5);
  double sum3 = 0.0, sum4 = 0.0, sum5 = 0.0, sumd2 = 0.0, m2 = 0.0, deg_term = 0.0;
  for (int j = 0; j < n; ++j) {
    double dj = W.at(j, 1);  // closed 2-walks = degree
    sum3 += W.at(j, 2);
    sum4 += W.at(j, 3);
    sum5 += W.at(j, 4);
    sumd2 += dj * dj;
    m2 += dj;
    deg_term += (dj - 2.0) * W.at(j, 2);
  }
  CycleCounts c;
  c.c3 = round_checked(sum3 / 6.0, "triangle count");
  c.c4 = round_checked((sum4 - 2.0 * sumd2 + m2) / 8.0, "quadrilateral count");
  c.c5 = round_checked((sum5 - 5.0 * sum3 - 5.0 * deg_term) / 10.0, "pentagon count");
  return c;
}

namespace {

int multiplicity_at(const EigenspacePartition& part, double target) {
  for (const Eigenspace& sp : part.groups)
    if (std::fabs(sp.mu - target) <= part.tau) return sp.dim();
  return 0;
}

}  // namespace

bool is_connected_spectral(const EigenspacePartition& part) {
  int m0 = multiplicity_at(part, 0.0);
  check(m0 >= 1, Err::BadParams, "no zero eigenvalue: not a Laplacian spectrum");
  return m0 == 1;
}

bool is_bipartite_spectral(const EigenspacePartition& part) {
  int m0 = multiplicity_at(part, 0.0);
  check(m0 >= 1, Err::BadParams, "no zero eigenvalue: not a Laplacian spectrum");
  return multiplicity_at(part, 2.0) == m0;
}

namespace {

// Simple cycles of length L, each counted once: the root is the cycle's
// minimum vertex and the orientation with path[1] < path[L-1] is kept.
long long count_cycles_of_length(const Graph& g, int L) {
  long long count = 0;
  std::vector<int> path;
  std::vector<char> used(g.n, 0);
  auto dfs = [&](auto&& self, int v) -> void {
    int s = path[0];
    if (int(path.size()) == L) {
      if (g.has_edge(v, s) && path[1] < path.back()) ++count;
      return;
    }
    for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      int w = g.neighbors[i];
      if (w <= s || used[w]) continue;
      used[w] = 1;
      path.push_back(w);
      self(self, w);
      path.pop_back();
      used[w] = 0;
    }
  };
  for (int s = 0; s < g.n; ++s) {
    path.assign(1, s);
    used.assign(g.n, 0);
    used[s] = 1;
    dfs(dfs, s);
  }
  return count;
}

}  // namespace

CycleCounts count_cycles_bruteforce(const Graph& g) {
  check(g.n <= 64, Err::TooLarge, "brute-force cycle count capped at 64 nodes");
  CycleCounts c;
  c.c3 = count_cycles_of_length(g, 3);
  c.c4 = count_cycles_of_length(g, 4);
  c.c5 = count_cycles_of_length(g, 5);
  return c;
}

std::vector<long long> matrix_power_diag(const Graph& g, int k) {
  check(k >= 1, Err::BadParams, "power >= 1");
  check(g.n <= 256, Err::TooLarge, "dense power capped at 256 nodes");
  int n = g.n;
  std::vector<long long> A(size_t(n) * n, 0), P(size_t(n) * n, 0), T(size_t(n) * n, 0);
  for (auto& [u, v] : g.edges) A[size_t(u) * n + v] = A[size_t(v) * n + u] = 1;
  P = A;
  for (int step = 1; step < k; ++step) {
    std::fill(T.begin(), T.end(), 0ll);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l) {
        long long pil = P[size_t(i) * n + l];
        if (!pil) continue;
        for (int j = 0; j < n; ++j) T[size_t(i) * n + j] += pil * A[size_t(l) * n + j];
      }
    P.swap(T);
  }
  std::vector<long long> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = P[size_t(i) * n + i];
  return diag;
}

bool is_connected_bfs(const Graph& g) {
  std::vector<char> seen(g.n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
      int w = g.neighbors[i];
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        q.push(w);
      }
    }
  }
  return reached == g.n;
}

bool is_bipartite_bfs(const Graph& g) {
  std::vector<int> color(g.n, -1);
  for (int s = 0; s < g.n; ++s) {
    if (color[s] != -1) continue;
    color[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int i = g.offsets[v]; i < g.offsets[v + 1]; ++i) {
        int w = g.neighbors[i];
        if (color[w] == -1) {
          color[w] = 1 - color[v];
          q.push(w);
        } else if (color[w] == color[v]) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace spe
