#include "spe/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spe::kern {

namespace {

std::atomic<int> g_cap{0};  // 0 = unresolved

int resolve_cap() {
  if (const char* env = std::getenv("SPECTRAL_PE_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// work thresholds below which threading is not worth spawning
constexpr long kMatmulFlopCutoff = 1 << 16;
constexpr long kRotateCutoff = 1 << 14;

bool use_parallel(long work, long cutoff) { return thread_cap() > 1 && work >= cutoff; }

}  // namespace

int thread_cap() {
  int c = g_cap.load(std::memory_order_relaxed);
  if (c == 0) {
    c = resolve_cap();
    g_cap.store(c, std::memory_order_relaxed);
  }
  return c;
}

void set_thread_cap(int cap) { g_cap.store(cap < 1 ? 1 : cap, std::memory_order_relaxed); }

// ---- matmul -----------------------------------------------------------

// one output row, fixed accumulation order shared by both variants
static inline void matmul_row(const double* A, const double* B, double* C, int i, int k, int n) {
  double* ci = C + size_t(i) * n;
  std::memset(ci, 0, sizeof(double) * n);
  const double* ai = A + size_t(i) * k;
  for (int l = 0; l < k; ++l) {
    double ail = ai[l];
    if (ail == 0.0) continue;
    const double* bl = B + size_t(l) * n;
    for (int j = 0; j < n; ++j) ci[j] += ail * bl[j];
  }
}

void matmul_serial(const double* A, const double* B, double* C, int m, int k, int n) {
  for (int i = 0; i < m; ++i) matmul_row(A, B, C, i, k, n);
}

void matmul_omp(const double* A, const double* B, double* C, int m, int k, int n) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_cap())
#endif
  for (int i = 0; i < m; ++i) matmul_row(A, B, C, i, k, n);
}

void matmul(const double* A, const double* B, double* C, int m, int k, int n) {
  if (use_parallel(long(m) * k * n, kMatmulFlopCutoff))
    matmul_omp(A, B, C, m, k, n);
  else
    matmul_serial(A, B, C, m, k, n);
}

static inline void at_b_row(const double* A, const double* B, double* C, int i, int k, int m,
                            int n) {
  double* ci = C + size_t(i) * n;
  std::memset(ci, 0, sizeof(double) * n);
  for (int l = 0; l < k; ++l) {
    double ali = A[size_t(l) * m + i];
    if (ali == 0.0) continue;
    const double* bl = B + size_t(l) * n;
    for (int j = 0; j < n; ++j) ci[j] += ali * bl[j];
  }
}

void matmul_at_b_serial(const double* A, const double* B, double* C, int k, int m, int n) {
  for (int i = 0; i < m; ++i) at_b_row(A, B, C, i, k, m, n);
}

void matmul_at_b_omp(const double* A, const double* B, double* C, int k, int m, int n) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_cap())
#endif
  for (int i = 0; i < m; ++i) at_b_row(A, B, C, i, k, m, n);
}

void matmul_at_b(const double* A, const double* B, double* C, int k, int m, int n) {
  if (use_parallel(long(m) * k * n, kMatmulFlopCutoff))
    matmul_at_b_omp(A, B, C, k, m, n);
  else
    matmul_at_b_serial(A, B, C, k, m, n);
}

static inline void a_bt_row(const double* A, const double* B, double* C, int i, int k, int n) {
  const double* ai = A + size_t(i) * k;
  double* ci = C + size_t(i) * n;
  for (int j = 0; j < n; ++j) {
    const double* bj = B + size_t(j) * k;
    double s = 0.0;
    for (int l = 0; l < k; ++l) s += ai[l] * bj[l];
    ci[j] = s;
  }
}

void matmul_a_bt_serial(const double* A, const double* B, double* C, int m, int k, int n) {
  for (int i = 0; i < m; ++i) a_bt_row(A, B, C, i, k, n);
}

void matmul_a_bt_omp(const double* A, const double* B, double* C, int m, int k, int n) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_cap())
#endif
  for (int i = 0; i < m; ++i) a_bt_row(A, B, C, i, k, n);
}

void matmul_a_bt(const double* A, const double* B, double* C, int m, int k, int n) {
  if (use_parallel(long(m) * k * n, kMatmulFlopCutoff))
    matmul_a_bt_omp(A, B, C, m, k, n);
  else
    matmul_a_bt_serial(A, B, C, m, k, n);
}

// ---- plane rotations --------------------------------------------------

// rows p,q are disjoint across the round, so rotations parallelize over nrot
static inline void rotate_row_pair(double* A, int n, const Rotation& r) {
  double* rp = A + size_t(r.p) * n;
  double* rq = A + size_t(r.q) * n;
  for (int j = 0; j < n; ++j) {
    double x = rp[j], y = rq[j];
    rp[j] = r.c * x - r.s * y;
    rq[j] = r.s * x + r.c * y;
  }
}

void rotate_rows_serial(double* A, int n, const Rotation* rot, int nrot) {
  for (int t = 0; t < nrot; ++t) rotate_row_pair(A, n, rot[t]);
}

void rotate_rows_omp(double* A, int n, const Rotation* rot, int nrot) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_cap())
#endif
  for (int t = 0; t < nrot; ++t) rotate_row_pair(A, n, rot[t]);
}

void rotate_rows(double* A, int n, const Rotation* rot, int nrot) {
  if (use_parallel(long(nrot) * n, kRotateCutoff))
    rotate_rows_omp(A, n, rot, nrot);
  else
    rotate_rows_serial(A, n, rot, nrot);
}

// column updates parallelize over matrix rows for locality
static inline void rotate_cols_one_row(double* A, int n, const Rotation* rot, int nrot, int i) {
  double* ri = A + size_t(i) * n;
  for (int t = 0; t < nrot; ++t) {
    const Rotation& r = rot[t];
    double x = ri[r.p], y = ri[r.q];
    ri[r.p] = r.c * x - r.s * y;
    ri[r.q] = r.s * x + r.c * y;
  }
}

void rotate_cols_serial(double* A, int rows, int n, const Rotation* rot, int nrot) {
  for (int i = 0; i < rows; ++i) rotate_cols_one_row(A, n, rot, nrot, i);
}

void rotate_cols_omp(double* A, int rows, int n, const Rotation* rot, int nrot) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(thread_cap())
#endif
  for (int i = 0; i < rows; ++i) rotate_cols_one_row(A, n, rot, nrot, i);
}

void rotate_cols(double* A, int rows, int n, const Rotation* rot, int nrot) {
  if (use_parallel(long(rows) * nrot, kRotateCutoff))
    rotate_cols_omp(A, rows, n, rot, nrot);
  else
    rotate_cols_serial(A, rows, n, rot, nrot);
}

double offdiag_sq(const double* A, int n) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* ri = A + size_t(i) * n;
    double row = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) row += ri[j] * ri[j];
    total += row;
  }
  return total;
}

}  // namespace spe::kern
