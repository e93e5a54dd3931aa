#include "spe/rng.hpp"

#include <cmath>

#include "spe/error.hpp"

namespace spe {

int Rng::uniform_int(int lo, int hi) {
  check(lo <= hi, Err::BadParams, "uniform_int: empty range");
  uint64_t range = uint64_t(hi) - uint64_t(lo) + 1;
  // smallest power-of-two mask covering the range, rejection loop
  uint64_t mask = range - 1;
  mask |= mask >> 1;
  mask |= mask >> 2;
  mask |= mask >> 4;
  mask |= mask >> 8;
  mask |= mask >> 16;
  mask |= mask >> 32;
  for (;;) {
    uint64_t x = eng_() & mask;
    if (x < range) return int(lo + int64_t(x));
  }
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform01();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

static uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

uint64_t Rng::derive(uint64_t master, uint64_t stream) {
  uint64_t x = splitmix64(master ^ splitmix64(stream + 1));
  return splitmix64(x + 0xA0761D6478BD642Full);
}

}  // namespace spe
