#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "spe/tensor.hpp"

namespace spe {

enum class Init { Zeros, GaussianFanIn, GaussianSmall };

struct Param {
  Tensor value;
  Tensor grad;
  Tensor adam_m, adam_v;
};

// Named parameter tensors with gradients and Adam state. Initialization is a
// pure function of (set seed, parameter name), so lazily declared parameters
// do not depend on declaration order.
class ParamSet {
 public:
  uint64_t seed = 0;
  int64_t steps = 0;
  std::map<std::string, Param> items;  // ordered: deterministic iteration

  ParamSet() = default;
  explicit ParamSet(uint64_t s) : seed(s) {}

  // creates on first use; re-declaration just validates the shape
  Tensor& declare(const std::string& name, Shape shape, Init init, int fan_in = 1);
  bool has(const std::string& name) const { return items.count(name) != 0; }
  Param& at(const std::string& name);
  const Param& at(const std::string& name) const;

  void zero_grads();
  void adam_step(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  size_t scalar_count() const;

  std::string to_json_str() const;
  static ParamSet from_json_str(const std::string& text);
};

struct GradCheckResult {
  double max_rel_err = 0.0;
  int coords_checked = 0;
};

// loss(ps, true) must run forward + backward, leaving gradients in ps and
// returning the scalar loss; loss(ps, false) only needs the value. Compares
// analytic gradients against central differences on sampled coordinates.
GradCheckResult grad_check(const std::function<double(ParamSet&, bool)>& loss, ParamSet& ps,
                           double h = 1e-5, uint64_t seed = 0, int coords = 64);

}  // namespace spe
