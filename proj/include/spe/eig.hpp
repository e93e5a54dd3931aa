#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "spe/matrix.hpp"

namespace spe {

// Full symmetric eigendecomposition, eigenvalues ascending, column i of
// vectors is the eigenvector for values[i]. Deterministic: the same input
// produces bitwise-identical output regardless of thread settings.
struct EigDecomp {
  std::vector<double> values;
  Matrix vectors;

  int n() const { return int(values.size()); }
};

// Cyclic Jacobi with a fixed tournament rotation order. Stops once the
// off-diagonal Frobenius norm falls below 1e-12 * ||M||_F, errors out after
// 100 sweeps.
EigDecomp eigh(const SymMatrix& M);

std::string eig_to_json(const EigDecomp& e);
EigDecomp eig_from_json(const std::string& text);

// Contiguous eigenvalue groups: consecutive eigenvalues chain into one group
// iff their gap is <= tau = tol_abs + tol_rel * max(1, |lambda_max|). Each
// group basis is re-orthonormalized (modified Gram-Schmidt, one extra pass).
struct Eigenspace {
  double mu = 0.0;  // mean eigenvalue of the group
  Matrix basis;     // n x dim, orthonormal
  int dim() const { return basis.cols; }
};

struct EigenspacePartition {
  int n = 0;
  double tau = 0.0;
  std::vector<double> values;  // all eigenvalues, ascending
  std::vector<Eigenspace> groups;
};

EigenspacePartition partition_eigenspaces(const EigDecomp& e, double tol_abs = 1e-8,
                                          double tol_rel = 1e-8);

// P = V V' for an orthonormal basis; P = V (V'V)^{-1} V' otherwise. The Gram
// matrix must have condition number <= 1e12.
Matrix projector(const Matrix& V, bool orthonormal = true);

// Seeded orthogonal d x d matrix. Haar-distributed: Gaussian matrix, modified
// Gram-Schmidt QR, R diagonal positive by construction. perm is empty for
// Haar samples and holds sigma for permutation samples (q[sigma[i]][i] = 1).
struct OrthogonalSample {
  Matrix q;
  std::vector<int> perm;
  uint64_t seed = 0;
};

OrthogonalSample sample_orthogonal(int d, uint64_t seed);
OrthogonalSample sample_permutation(int n, uint64_t seed);

// out[sigma[i], :] = M[i, :]
Matrix permute_rows(const Matrix& M, const std::vector<int>& sigma);

}  // namespace spe
