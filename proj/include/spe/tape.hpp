#pragma once
#include <string>
#include <vector>

#include "spe/tensor.hpp"

namespace spe {

class ParamSet;

// Reverse-mode tape over a fixed primitive vocabulary. Values are computed
// eagerly as nodes are recorded; backward() runs one reverse sweep from a
// scalar output and accumulates parameter gradients into the bound ParamSet.
// There is no implicit broadcasting anywhere: shapes must match exactly, and
// the only shape-changing ops are the structural ones (sum_axis, mean_nodes,
// concat, slice, reshape).
class Tape {
 public:
  explicit Tape(ParamSet* params = nullptr) : params_(params) {}

  int input(Tensor t);                  // constant leaf
  int param(const std::string& name);   // trainable leaf from the bound ParamSet

  int matmul(int a, int b);             // (m,k) x (k,n) -> (m,n)
  int add(int a, int b);                // same shape
  int sub(int a, int b);
  int mul(int a, int b);                // elementwise
  int relu(int a);                      // gradient at 0 is 0
  int tanh(int a);
  int exp(int a);
  int sum_axis(int a, int axis);        // drops the axis
  int mean_nodes(int a);                // (n,c): mean over rows, broadcast back;
                                        // (B,n,c): per-batch mean over axis 1
  int concat(int a, int b, int axis);   // 2-d, axis 0 or 1
  int slice(int a, int axis, int begin, int end);
  int scale(int a, double alpha);
  int rank1(int v, int x);              // (n,1),(n,d) -> v (v' x), exactly sign-even
  int reshape(int a, Shape s);          // same numel, data order unchanged

  const Tensor& value(int id) const { return nodes_[id].val; }
  const std::vector<double>& grad(int id) const { return nodes_[id].grad; }

  // out must be scalar (numel 1); seeds d(out)/d(out) = 1
  void backward(int out);

  int size() const { return int(nodes_.size()); }

 private:
  enum class Op {
    Input,
    Param,
    Matmul,
    Add,
    Sub,
    Mul,
    Relu,
    Tanh,
    Exp,
    SumAxis,
    MeanNodes,
    Concat,
    Slice,
    Scale,
    Rank1,
    Reshape,
  };
  struct Node {
    Op op;
    int a = -1, b = -1;
    int axis = 0, begin = 0, end = 0;
    double alpha = 1.0;
    Tensor val;
    std::vector<double> grad;
    std::string param_name;
  };

  int push(Node n);
  const Tensor& val(int id) const { return nodes_[id].val; }

  std::vector<Node> nodes_;
  ParamSet* params_;
};

}  // namespace spe
