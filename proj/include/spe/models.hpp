#pragma once
#include <string>
#include <vector>

#include "spe/blocks.hpp"
#include "spe/eig.hpp"
#include "spe/filters.hpp"
#include "spe/graph.hpp"
#include "spe/params.hpp"

namespace spe {

enum class SignMode { Sum, Concat };  // sum over phi outputs vs fixed-k concat
enum class Equivariance { NodeEquivariant, Unconstrained };

// f(v_1..v_k) = rho([phi(z_i) + phi(-z_i)]_i) where z_i stacks the
// eigenvector with optional constant channels (eigenvalue, node features).
// The mirror sum makes every output exactly even in each v_i; permutation
// equivariance holds in NodeEquivariant mode when phi and rho are built from
// node-symmetric blocks.
struct SignNetModel {
  BlockSpec phi;
  BlockSpec rho;
  SignMode mode = SignMode::Sum;
  Equivariance equiv = Equivariance::NodeEquivariant;
  bool uses_eigvals = true;
  bool uses_features = false;
  int k_fixed = 0;  // Concat mode only
  int d_phi = 8;
  int d_out = 4;
  bool mirror = true;  // false drops the phi(-v) term (deliberately broken)
  mutable ParamSet params;

  // fixed-weight spectral convolution: phi = (theta_i / 2) v (v'x), rho = sum
  bool fixed_conv = false;
  std::vector<double> theta;  // one coefficient per eigenvector index
  bool has_filter = false;
  FilterSpec filter;  // theta_i = filter(lambda_i)
};

// eigvecs: n x k with unit columns; eigvals: k; x: optional n x d features;
// g: required when a block needs adjacency (gin). Output is (n, d_out) in
// NodeEquivariant mode and (1, d_out) in Unconstrained mode.
Tensor signnet_forward(const SignNetModel& m, const Matrix& eigvecs,
                       const std::vector<double>& eigvals, const Matrix* x = nullptr,
                       const Graph* g = nullptr);

// Records the forward pass on t (which must be bound to m.params) and returns
// the output node, so a caller can attach a loss and run backward.
int signnet_build(Tape& t, const SignNetModel& m, const Matrix& eigvecs,
                  const std::vector<double>& eigvals, const Matrix* x = nullptr,
                  const Graph* g = nullptr);

// phi(z_i) + phi(-z_i) for one branch, before aggregation
Matrix signnet_phi_features(const SignNetModel& m, const Matrix& eigvecs,
                            const std::vector<double>& eigvals, const Matrix* x, const Graph* g,
                            int index);

SignNetModel construct_spectral_conv_signnet(std::vector<double> theta);
SignNetModel construct_spectral_conv_signnet(const FilterSpec& h);

// f(V_1..V_l) = rho(sum_i IGN_{d_i}(V_i V_i')) with IGN parameters shared
// across eigenspaces of equal dimension and instantiated on first use. The
// projector is computed before anything else, so any orthonormal basis of an
// eigenspace gives the same output up to roundoff.
struct BasisNetModel {
  int ign_layers = 2;
  int ign_width = 16;
  Act act = Act::Tanh;
  BlockSpec rho;
  bool uses_eigvals = true;   // appends mu as a constant feature channel
  bool uses_features = false; // adds P (1 x_c') channels and a rho skip to x
  int d_phi = 8;
  int d_out = 4;
  mutable ParamSet params;
};

Tensor basisnet_forward(const BasisNetModel& m, const EigenspacePartition& part,
                        const Matrix* x = nullptr);

// tape-building form, as for signnet_build
int basisnet_build(Tape& t, const BasisNetModel& m, const EigenspacePartition& part,
                   const Matrix* x = nullptr);

// versioned checkpoints: {"schema_version":1,"kind":"signnet"|"basisnet",...}
std::string model_to_json(const SignNetModel& m);
std::string model_to_json(const BasisNetModel& m);

struct ModelCheckpoint {
  std::string kind;  // "signnet" | "basisnet"
  SignNetModel sign;
  BasisNetModel basis;
};
ModelCheckpoint model_from_json(const std::string& text);

}  // namespace spe
