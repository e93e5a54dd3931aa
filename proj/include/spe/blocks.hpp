#pragma once
#include <string>

#include "spe/params.hpp"
#include "spe/tape.hpp"

namespace spe {

enum class Act { Relu, Tanh };
Act act_from_string(const std::string& s);
std::string act_to_string(Act a);

// kind: elementwise-mlp | deepsets | gin | ign2-m2v
struct BlockSpec {
  std::string kind = "deepsets";
  int layers = 2;
  int width = 16;
  Act act = Act::Tanh;
};

// All stacks map (rows, c_in) -> (rows, c_out) with the activation between
// layers and a linear final layer. Parameters are declared lazily under
// `prefix`; their init depends only on (ParamSet seed, name).
int apply_act(Tape& t, int h, Act act);

// per-row MLP; rows may be a stack of independent branches
int mlp_stack(Tape& t, int h, ParamSet& ps, const std::string& prefix, int c_in, int c_out,
              int layers, int width, Act act);

// h'(r) = act(h W1 + mean_rows(h) W2 + b); batch > 1 treats the rows as
// `batch` blocks of equal length and takes per-block means
int deepsets_stack(Tape& t, int h, int batch, ParamSet& ps, const std::string& prefix, int c_in,
                   int c_out, int layers, int width, Act act);

// h' = MLP((1 + eps) h + A h), eps = 0; adj is an (n,n) constant node
int gin_stack(Tape& t, int h, int adj, ParamSet& ps, const std::string& prefix, int c_in,
              int c_out, int layers, int width, Act act);

// The five linear invariants of a square matrix per node j and channel:
// diag, rowsum/n, colsum/n, total/n^2, trace/n. m is (n,n) or (n,n,c).
Matrix ign2_features(const Tensor& m);

// feature extraction + linear mix + bias + act, then deepsets layers
int ign2_m2v_stack(Tape& t, const Tensor& m, const double* mu, ParamSet& ps,
                   const std::string& prefix, int c_out, int layers, int width, Act act);

int bias_add(Tape& t, int h, ParamSet& ps, const std::string& name, int rows, int width);

}  // namespace spe
