#pragma once
#include <vector>

#include "spe/eig.hpp"
#include "spe/graph.hpp"

namespace spe {

// Angles between the standard basis vectors and the adjacency eigenspaces:
// alpha[i][j] = || P_i e_j ||_2 where P_i projects onto eigenspace i. Rows
// follow the eigenspace partition (ascending mu); columns are nodes.
struct AngleTable {
  std::vector<double> mu;
  std::vector<int> mult;
  Matrix alpha;  // l x n
};

// part must come from an adjacency decomposition
AngleTable graph_angles(const EigenspacePartition& part);

// counts[j][k-1] = number of closed k-walks at node j, as the real value
// sum_i mu_i^k alpha_ij^2; kmax >= 1
Matrix closed_walk_counts(const AngleTable& at, int kmax);

struct CycleCounts {
  long long c3 = 0, c4 = 0, c5 = 0;
};

// Triangle, quadrilateral, and pentagon counts recovered from closed-walk
// counts; every count must round to an integer within 1e-6.
CycleCounts cycle_counts_from_spectrum(const AngleTable& at);

// part must come from a normalized-Laplacian decomposition
bool is_connected_spectral(const EigenspacePartition& part);
// true iff the multiplicity of eigenvalue 2 equals the multiplicity of
// eigenvalue 0 (every component bipartite)
bool is_bipartite_spectral(const EigenspacePartition& part);

// combinatorial oracles
CycleCounts count_cycles_bruteforce(const Graph& g);  // n <= 64
std::vector<long long> matrix_power_diag(const Graph& g, int k);
bool is_connected_bfs(const Graph& g);
bool is_bipartite_bfs(const Graph& g);

}  // namespace spe
