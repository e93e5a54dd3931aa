#pragma once
#include <string>
#include <vector>

#include "spe/matrix.hpp"

namespace spe {

// Dense tensor with one to three axes, row-major.
struct Shape {
  int nd = 0;
  int d[3] = {1, 1, 1};

  Shape() = default;
  explicit Shape(int a) : nd(1) { d[0] = a; }
  Shape(int a, int b) : nd(2) {
    d[0] = a;
    d[1] = b;
  }
  Shape(int a, int b, int c) : nd(3) {
    d[0] = a;
    d[1] = b;
    d[2] = c;
  }

  long long numel() const {
    long long p = 1;
    for (int i = 0; i < nd; ++i) p *= d[i];
    return p;
  }
  bool operator==(const Shape& o) const {
    if (nd != o.nd) return false;
    for (int i = 0; i < nd; ++i)
      if (d[i] != o.d[i]) return false;
    return true;
  }
  bool operator!=(const Shape& o) const { return !(*this == o); }
  std::string str() const;
};

struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(s), data(size_t(s.numel()), 0.0) {}

  static Tensor from_matrix(const Matrix& m);
  Matrix to_matrix() const;  // requires nd == 2
};

}  // namespace spe
