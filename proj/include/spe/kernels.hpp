#pragma once

namespace spe::kern {

// Compute kernels come in _serial and _omp variants with identical per-element
// arithmetic: parallelism is only ever across independent output elements and
// no reduction order depends on the thread count, so results are bitwise equal
// for any thread setting. The unsuffixed entry points dispatch on problem size
// and the configured cap.

// Thread cap. Resolution order: explicit set_thread_cap() > SPECTRAL_PE_THREADS
// env var > OpenMP default. Always >= 1; 1 in builds without OpenMP.
int thread_cap();
void set_thread_cap(int cap);

// C(m x n) = A(m x k) * B(k x n), row-major
void matmul_serial(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_omp(const double* A, const double* B, double* C, int m, int k, int n);
void matmul(const double* A, const double* B, double* C, int m, int k, int n);

// C(m x n) = A'(m x k) * B(k x n) where A is stored k x m
void matmul_at_b_serial(const double* A, const double* B, double* C, int k, int m, int n);
void matmul_at_b_omp(const double* A, const double* B, double* C, int k, int m, int n);
void matmul_at_b(const double* A, const double* B, double* C, int k, int m, int n);

// C(m x n) = A(m x k) * B'(k x n) where B is stored n x k
void matmul_a_bt_serial(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_a_bt_omp(const double* A, const double* B, double* C, int m, int k, int n);
void matmul_a_bt(const double* A, const double* B, double* C, int m, int k, int n);

// One round of plane rotations on pairwise-disjoint index pairs.
struct Rotation {
  int p, q;     // p < q
  double c, s;
};

// A(n x n) <- J' * A : rows p,q of each rotation are recombined
void rotate_rows_serial(double* A, int n, const Rotation* rot, int nrot);
void rotate_rows_omp(double* A, int n, const Rotation* rot, int nrot);
void rotate_rows(double* A, int n, const Rotation* rot, int nrot);

// A(rows x n) <- A * J : columns p,q of each rotation are recombined
void rotate_cols_serial(double* A, int rows, int n, const Rotation* rot, int nrot);
void rotate_cols_omp(double* A, int rows, int n, const Rotation* rot, int nrot);
void rotate_cols(double* A, int rows, int n, const Rotation* rot, int nrot);

// Sum of squared off-diagonal entries. Row partials are accumulated serially
// so the result does not depend on threading.
double offdiag_sq(const double* A, int n);

}  // namespace spe::kern
