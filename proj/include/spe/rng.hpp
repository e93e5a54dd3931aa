#pragma once
#include <cstdint>
#include <random>

namespace spe {

// Deterministic RNG. All transforms are hand-rolled on top of mt19937_64 so
// that streams are reproducible across standard libraries; std::*_distribution
// is implementation-defined and must not be used anywhere in this project.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // uniform on (0, 1]
  double uniform01() { return double((eng_() >> 11) + 1) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // inclusive bounds, rejection-free modulo bias is avoided by masking
  int uniform_int(int lo, int hi);

  // standard normal via Box-Muller, pairs cached
  double gaussian();

  // stream derivation: independent child seed for (master, stream)
  static uint64_t derive(uint64_t master, uint64_t stream);

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spe
