#pragma once
#include <vector>

namespace spe {

// Dense row-major matrix of doubles.
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(size_t(r) * c, 0.0) {}

  double& at(int i, int j) { return a[size_t(i) * cols + j]; }
  double at(int i, int j) const { return a[size_t(i) * cols + j]; }
  double* data() { return a.data(); }
  const double* data() const { return a.data(); }
  bool empty() const { return rows == 0 || cols == 0; }

  static Matrix identity(int n);
  Matrix transpose() const;
  Matrix col(int j) const;  // rows x 1 slice
};

Matrix matmul(const Matrix& A, const Matrix& B);       // A * B
Matrix matmul_at_b(const Matrix& A, const Matrix& B);  // A' * B
Matrix matmul_a_bt(const Matrix& A, const Matrix& B);  // A * B'

Matrix add(const Matrix& A, const Matrix& B);
Matrix sub(const Matrix& A, const Matrix& B);
Matrix scale(const Matrix& A, double s);

double frob_norm(const Matrix& A);
double max_abs(const Matrix& A);
double max_abs_diff(const Matrix& A, const Matrix& B);
double determinant(Matrix A);  // by value: eliminated in place

// Symmetric matrix: a Matrix whose symmetry was checked at construction,
// within 1e-12 * (1 + max |entry|).
struct SymMatrix {
  Matrix m;
  explicit SymMatrix(Matrix src);
  int n() const { return m.rows; }
};

}  // namespace spe
