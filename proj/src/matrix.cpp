#include "spe/matrix.hpp"

#include <cmath>

#include "spe/error.hpp"
#include "spe/kernels.hpp"

namespace spe {

Matrix Matrix::identity(int n) {
  Matrix I(n, n);
  for (int i = 0; i < n; ++i) I.at(i, i) = 1.0;
  return I;
}

Matrix Matrix::transpose() const {
  Matrix T(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) T.at(j, i) = at(i, j);
  return T;
}

Matrix Matrix::col(int j) const {
  check(j >= 0 && j < cols, Err::IndexOutOfRange, "column index");
  Matrix c(rows, 1);
  for (int i = 0; i < rows; ++i) c.at(i, 0) = at(i, j);
  return c;
}

Matrix matmul(const Matrix& A, const Matrix& B) {
  check(A.cols == B.rows, Err::ShapeMismatch, "matmul inner dims");
  Matrix C(A.rows, B.cols);
  kern::matmul(A.data(), B.data(), C.data(), A.rows, A.cols, B.cols);
  return C;
}

Matrix matmul_at_b(const Matrix& A, const Matrix& B) {
  check(A.rows == B.rows, Err::ShapeMismatch, "matmul_at_b inner dims");
  Matrix C(A.cols, B.cols);
  kern::matmul_at_b(A.data(), B.data(), C.data(), A.rows, A.cols, B.cols);
  return C;
}

Matrix matmul_a_bt(const Matrix& A, const Matrix& B) {
  check(A.cols == B.cols, Err::ShapeMismatch, "matmul_a_bt inner dims");
  Matrix C(A.rows, B.rows);
  kern::matmul_a_bt(A.data(), B.data(), C.data(), A.rows, A.cols, B.rows);
  return C;
}

Matrix add(const Matrix& A, const Matrix& B) {
  check(A.rows == B.rows && A.cols == B.cols, Err::ShapeMismatch, "add dims");
  Matrix C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] += B.a[i];
  return C;
}

Matrix sub(const Matrix& A, const Matrix& B) {
  check(A.rows == B.rows && A.cols == B.cols, Err::ShapeMismatch, "sub dims");
  Matrix C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] -= B.a[i];
  return C;
}

Matrix scale(const Matrix& A, double s) {
  Matrix C = A;
  for (double& x : C.a) x *= s;
  return C;
}

double frob_norm(const Matrix& A) {
  double s = 0.0;
  for (double x : A.a) s += x * x;
  return std::sqrt(s);
}

double max_abs(const Matrix& A) {
  double m = 0.0;
  for (double x : A.a) m = std::max(m, std::fabs(x));
  return m;
}

double max_abs_diff(const Matrix& A, const Matrix& B) {
  check(A.rows == B.rows && A.cols == B.cols, Err::ShapeMismatch, "max_abs_diff dims");
  double m = 0.0;
  for (size_t i = 0; i < A.a.size(); ++i) m = std::max(m, std::fabs(A.a[i] - B.a[i]));
  return m;
}

double determinant(Matrix A) {
  check(A.rows == A.cols, Err::NotSquare, "determinant");
  int n = A.rows;
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(A.at(r, c)) > std::fabs(A.at(piv, c))) piv = r;
    if (A.at(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(A.at(piv, j), A.at(c, j));
      det = -det;
    }
    det *= A.at(c, c);
    for (int r = c + 1; r < n; ++r) {
      double f = A.at(r, c) / A.at(c, c);
      for (int j = c; j < n; ++j) A.at(r, j) -= f * A.at(c, j);
    }
  }
  return det;
}

SymMatrix::SymMatrix(Matrix src) : m(std::move(src)) {
  check(m.rows == m.cols, Err::NotSquare, "SymMatrix");
  double tol = 1e-12 * (1.0 + max_abs(m));
  for (int i = 0; i < m.rows; ++i)
    for (int j = i + 1; j < m.cols; ++j)
      check(std::fabs(m.at(i, j) - m.at(j, i)) <= tol, Err::BadParams,
            "SymMatrix: asymmetric entry");
}

}  // namespace spe
