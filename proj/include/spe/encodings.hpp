#pragma once
#include <vector>

#include "spe/eig.hpp"
#include "spe/graph.hpp"

namespace spe {

// Positional encodings from the normalized-Laplacian spectrum. All are
// basis invariant: they depend on eigenvectors only through sums of
// squares over full eigenspaces.

// column per t: pe[j][ti] = sum_i exp(-t lambda_i) v_ij^2
Matrix heat_pe(const EigDecomp& e, const std::vector<double>& ts);

// column per k: diag of the k-step random-walk operator (D^{-1} A)^k,
// computed spectrally as sum_i (1 - lambda_i)^k v_ij^2
Matrix rwpe(const Graph& g, const EigDecomp& e, const std::vector<int>& ks);

enum class KernelKind { Diffusion, PStep, Gpr, Landing };

struct PEConfig {
  KernelKind kind = KernelKind::Diffusion;
  double t = 1.0;               // Diffusion: exp(-t L)
  double gamma = 0.5;           // PStep: (I - gamma L)^p
  int p = 1;
  std::vector<double> gammas;   // Gpr: sum_k gamma_k (D^{-1}A)^k, k from 0
  int k = 1;                    // Landing: (D^{-1}A)^k
};

// full n x n kernel matrix; Gpr and Landing live in the random-walk basis,
// i.e. D^{-1/2} f(L) D^{1/2}
Matrix kernel_matrix(const Graph& g, const EigDecomp& e, const PEConfig& cfg);

}  // namespace spe
