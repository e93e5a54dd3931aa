#include "spe/tape.hpp"

#include <cmath>

#include "spe/error.hpp"
#include "spe/kernels.hpp"
#include "spe/params.hpp"

namespace spe {

std::string Shape::str() const {
  std::string s = "(";
  for (int i = 0; i < nd; ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + ")";
}

Tensor Tensor::from_matrix(const Matrix& m) {
  Tensor t(Shape(m.rows, m.cols));
  t.data = m.a;
  return t;
}

Matrix Tensor::to_matrix() const {
  check(shape.nd == 2, Err::ShapeMismatch, "to_matrix needs a 2-d tensor, got " + shape.str());
  Matrix m(shape.d[0], shape.d[1]);
  m.a = data;
  return m;
}

namespace {

// padded sizes: any tensor is viewed as (s0, s1, s2) with trailing ones
void padded(const Shape& s, int out[3]) {
  out[0] = s.nd > 0 ? s.d[0] : 1;
  out[1] = s.nd > 1 ? s.d[1] : 1;
  out[2] = s.nd > 2 ? s.d[2] : 1;
}

Shape drop_axis(const Shape& s, int axis) {
  if (s.nd <= 1) return Shape(1);
  Shape r;
  r.nd = s.nd - 1;
  int k = 0;
  for (int i = 0; i < s.nd; ++i)
    if (i != axis) r.d[k++] = s.d[i];
  return r;
}

}  // namespace

int Tape::push(Node n) {
  n.grad.assign(n.val.data.size(), 0.0);
  nodes_.push_back(std::move(n));
  return int(nodes_.size()) - 1;
}

int Tape::input(Tensor t) {
  Node n;
  n.op = Op::Input;
  n.val = std::move(t);
  return push(std::move(n));
}

int Tape::param(const std::string& name) {
  check(params_ != nullptr, Err::BadParams, "tape has no bound ParamSet");
  Node n;
  n.op = Op::Param;
  n.val = params_->at(name).value;
  n.param_name = name;
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check(A.shape.nd == 2 && B.shape.nd == 2, Err::ShapeMismatch, "matmul needs 2-d operands");
  check(A.shape.d[1] == B.shape.d[0], Err::ShapeMismatch,
        "matmul " + A.shape.str() + " x " + B.shape.str());
  Node n;
  n.op = Op::Matmul;
  n.a = a;
  n.b = b;
  n.val = Tensor(Shape(A.shape.d[0], B.shape.d[1]));
  kern::matmul(A.data.data(), B.data.data(), n.val.data.data(), A.shape.d[0], A.shape.d[1],
               B.shape.d[1]);
  return push(std::move(n));
}

int Tape::add(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check(A.shape == B.shape, Err::ShapeMismatch, "add " + A.shape.str() + " vs " + B.shape.str());
  Node n;
  n.op = Op::Add;
  n.a = a;
  n.b = b;
  n.val = A;
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] += B.data[i];
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check(A.shape == B.shape, Err::ShapeMismatch, "sub " + A.shape.str() + " vs " + B.shape.str());
  Node n;
  n.op = Op::Sub;
  n.a = a;
  n.b = b;
  n.val = A;
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] -= B.data[i];
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check(A.shape == B.shape, Err::ShapeMismatch, "mul " + A.shape.str() + " vs " + B.shape.str());
  Node n;
  n.op = Op::Mul;
  n.a = a;
  n.b = b;
  n.val = A;
  for (size_t i = 0; i < n.val.data.size(); ++i) n.val.data[i] *= B.data[i];
  return push(std::move(n));
}

int Tape::relu(int a) {
  Node n;
  n.op = Op::Relu;
  n.a = a;
  n.val = val(a);
  for (double& x : n.val.data) x = x > 0.0 ? x : 0.0;
  return push(std::move(n));
}

int Tape::tanh(int a) {
  Node n;
  n.op = Op::Tanh;
  n.a = a;
  n.val = val(a);
  for (double& x : n.val.data) x = std::tanh(x);
  return push(std::move(n));
}

int Tape::exp(int a) {
  Node n;
  n.op = Op::Exp;
  n.a = a;
  n.val = val(a);
  for (double& x : n.val.data) x = std::exp(x);
  return push(std::move(n));
}

int Tape::sum_axis(int a, int axis) {
  const Tensor& A = val(a);
  check(axis >= 0 && axis < std::max(A.shape.nd, 1), Err::BadParams, "sum_axis axis");
  Node n;
  n.op = Op::SumAxis;
  n.a = a;
  n.axis = axis;
  n.val = Tensor(drop_axis(A.shape, axis));
  int s[3];
  padded(A.shape, s);
  for (int i0 = 0; i0 < s[0]; ++i0)
    for (int i1 = 0; i1 < s[1]; ++i1)
      for (int i2 = 0; i2 < s[2]; ++i2) {
        int idx[3] = {i0, i1, i2};
        long long src = (static_cast<long long>(i0) * s[1] + i1) * s[2] + i2;
        long long dst = 0;
        for (int ax = 0; ax < A.shape.nd; ++ax)
          if (ax != axis) dst = dst * s[ax] + idx[ax];
        n.val.data[size_t(dst)] += A.data[size_t(src)];
      }
  return push(std::move(n));
}

int Tape::mean_nodes(int a) {
  const Tensor& A = val(a);
  check(A.shape.nd == 2 || A.shape.nd == 3, Err::ShapeMismatch,
        "mean_nodes needs (n,c) or (B,n,c), got " + A.shape.str());
  Node n;
  n.op = Op::MeanNodes;
  n.a = a;
  n.val = Tensor(A.shape);
  int B = A.shape.nd == 3 ? A.shape.d[0] : 1;
  int rows = A.shape.nd == 3 ? A.shape.d[1] : A.shape.d[0];
  int c = A.shape.nd == 3 ? A.shape.d[2] : A.shape.d[1];
  for (int b = 0; b < B; ++b) {
    const double* src = A.data.data() + size_t(b) * rows * c;
    double* dst = n.val.data.data() + size_t(b) * rows * c;
    for (int j = 0; j < c; ++j) {
      double s = 0.0;
      for (int r = 0; r < rows; ++r) s += src[size_t(r) * c + j];
      s /= rows;
      for (int r = 0; r < rows; ++r) dst[size_t(r) * c + j] = s;
    }
  }
  return push(std::move(n));
}

int Tape::concat(int a, int b, int axis) {
  const Tensor& A = val(a);
  const Tensor& B = val(b);
  check(A.shape.nd == 2 && B.shape.nd == 2, Err::ShapeMismatch, "concat needs 2-d operands");
  check(axis == 0 || axis == 1, Err::BadParams, "concat axis");
  int keep = 1 - axis;
  check(A.shape.d[keep] == B.shape.d[keep], Err::ShapeMismatch,
        "concat " + A.shape.str() + " | " + B.shape.str());
  Node n;
  n.op = Op::Concat;
  n.a = a;
  n.b = b;
  n.axis = axis;
  if (axis == 0) {
    n.val = Tensor(Shape(A.shape.d[0] + B.shape.d[0], A.shape.d[1]));
    std::copy(A.data.begin(), A.data.end(), n.val.data.begin());
    std::copy(B.data.begin(), B.data.end(), n.val.data.begin() + A.data.size());
  } else {
    int rows = A.shape.d[0], ca = A.shape.d[1], cb = B.shape.d[1];
    n.val = Tensor(Shape(rows, ca + cb));
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < ca; ++j) n.val.data[size_t(r) * (ca + cb) + j] = A.data[size_t(r) * ca + j];
      for (int j = 0; j < cb; ++j)
        n.val.data[size_t(r) * (ca + cb) + ca + j] = B.data[size_t(r) * cb + j];
    }
  }
  return push(std::move(n));
}

int Tape::slice(int a, int axis, int begin, int end) {
  const Tensor& A = val(a);
  check(axis >= 0 && axis < A.shape.nd, Err::BadParams, "slice axis");
  check(0 <= begin && begin < end && end <= A.shape.d[axis], Err::BadParams, "slice range");
  Node n;
  n.op = Op::Slice;
  n.a = a;
  n.axis = axis;
  n.begin = begin;
  n.end = end;
  Shape os = A.shape;
  os.d[axis] = end - begin;
  n.val = Tensor(os);
  int s[3], o[3];
  padded(A.shape, s);
  padded(os, o);
  for (int i0 = 0; i0 < o[0]; ++i0)
    for (int i1 = 0; i1 < o[1]; ++i1)
      for (int i2 = 0; i2 < o[2]; ++i2) {
        int j[3] = {i0, i1, i2};
        j[axis] += begin;
        n.val.data[(size_t(i0) * o[1] + i1) * o[2] + i2] =
            A.data[(size_t(j[0]) * s[1] + j[1]) * s[2] + j[2]];
      }
  return push(std::move(n));
}

int Tape::scale(int a, double alpha) {
  Node n;
  n.op = Op::Scale;
  n.a = a;
  n.alpha = alpha;
  n.val = val(a);
  for (double& x : n.val.data) x *= alpha;
  return push(std::move(n));
}

int Tape::rank1(int v, int x) {
  const Tensor& V = val(v);
  const Tensor& X = val(x);
  check(V.shape.nd == 2 && V.shape.d[1] == 1, Err::ShapeMismatch, "rank1 expects v as (n,1)");
  check(X.shape.nd == 2 && X.shape.d[0] == V.shape.d[0], Err::ShapeMismatch,
        "rank1 " + V.shape.str() + " vs " + X.shape.str());
  int rows = X.shape.d[0], d = X.shape.d[1];
  Node n;
  n.op = Op::Rank1;
  n.a = v;
  n.b = x;
  n.val = Tensor(X.shape);
  std::vector<double> s(d, 0.0);  // s = v' x
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < d; ++j) s[j] += V.data[r] * X.data[size_t(r) * d + j];
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < d; ++j) n.val.data[size_t(r) * d + j] = V.data[r] * s[j];
  return push(std::move(n));
}

int Tape::reshape(int a, Shape s) {
  const Tensor& A = val(a);
  check(s.numel() == A.shape.numel(), Err::ShapeMismatch,
        "reshape " + A.shape.str() + " -> " + s.str());
  Node n;
  n.op = Op::Reshape;
  n.a = a;
  n.val = A;
  n.val.shape = s;
  return push(std::move(n));
}

void Tape::backward(int out) {
  check(out >= 0 && out < size(), Err::BadParams, "backward: bad node id");
  check(nodes_[out].val.shape.numel() == 1, Err::ShapeMismatch, "backward needs a scalar output");

  std::vector<char> needed(nodes_.size(), 0);
  needed[out] = 1;
  for (int id = out; id >= 0; --id) {
    if (!needed[id]) continue;
    if (nodes_[id].a >= 0) needed[nodes_[id].a] = 1;
    if (nodes_[id].b >= 0) needed[nodes_[id].b] = 1;
  }

  for (auto& n : nodes_) std::fill(n.grad.begin(), n.grad.end(), 0.0);
  nodes_[out].grad[0] = 1.0;

  for (int id = out; id >= 0; --id) {
    if (!needed[id]) continue;
    Node& n = nodes_[id];
    const std::vector<double>& g = n.grad;
    switch (n.op) {
      case Op::Input:
        break;
      case Op::Param: {
        Param& p = params_->at(n.param_name);
        for (size_t i = 0; i < g.size(); ++i) p.grad.data[i] += g[i];
        break;
      }
      case Op::Matmul: {
        const Tensor& A = val(n.a);
        const Tensor& B = val(n.b);
        int m = A.shape.d[0], k = A.shape.d[1], c = B.shape.d[1];
        std::vector<double> tmp(size_t(m) * k);
        kern::matmul_a_bt(g.data(), B.data.data(), tmp.data(), m, c, k);
        for (size_t i = 0; i < tmp.size(); ++i) nodes_[n.a].grad[i] += tmp[i];
        tmp.assign(size_t(k) * c, 0.0);
        kern::matmul_at_b(A.data.data(), g.data(), tmp.data(), m, k, c);
        for (size_t i = 0; i < tmp.size(); ++i) nodes_[n.b].grad[i] += tmp[i];
        break;
      }
      case Op::Add:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad[i] += g[i];
          nodes_[n.b].grad[i] += g[i];
        }
        break;
      case Op::Sub:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad[i] += g[i];
          nodes_[n.b].grad[i] -= g[i];
        }
        break;
      case Op::Mul:
        for (size_t i = 0; i < g.size(); ++i) {
          nodes_[n.a].grad[i] += g[i] * val(n.b).data[i];
          nodes_[n.b].grad[i] += g[i] * val(n.a).data[i];
        }
        break;
      case Op::Relu:
        for (size_t i = 0; i < g.size(); ++i)
          if (val(n.a).data[i] > 0.0) nodes_[n.a].grad[i] += g[i];
        break;
      case Op::Tanh:
        for (size_t i = 0; i < g.size(); ++i)
          nodes_[n.a].grad[i] += g[i] * (1.0 - n.val.data[i] * n.val.data[i]);
        break;
      case Op::Exp:
        for (size_t i = 0; i < g.size(); ++i) nodes_[n.a].grad[i] += g[i] * n.val.data[i];
        break;
      case Op::SumAxis: {
        const Shape& as = val(n.a).shape;
        int s[3];
        padded(as, s);
        for (int i0 = 0; i0 < s[0]; ++i0)
          for (int i1 = 0; i1 < s[1]; ++i1)
            for (int i2 = 0; i2 < s[2]; ++i2) {
              int idx[3] = {i0, i1, i2};
              long long dst = 0;
              for (int ax = 0; ax < as.nd; ++ax)
                if (ax != n.axis) dst = dst * s[ax] + idx[ax];
              nodes_[n.a].grad[(size_t(i0) * s[1] + i1) * s[2] + i2] += g[size_t(dst)];
            }
        break;
      }
      case Op::MeanNodes: {
        const Shape& as = val(n.a).shape;
        int B = as.nd == 3 ? as.d[0] : 1;
        int rows = as.nd == 3 ? as.d[1] : as.d[0];
        int c = as.nd == 3 ? as.d[2] : as.d[1];
        for (int b = 0; b < B; ++b) {
          const double* gb = g.data() + size_t(b) * rows * c;
          double* ab = nodes_[n.a].grad.data() + size_t(b) * rows * c;
          for (int j = 0; j < c; ++j) {
            double s = 0.0;
            for (int r = 0; r < rows; ++r) s += gb[size_t(r) * c + j];
            s /= rows;
            for (int r = 0; r < rows; ++r) ab[size_t(r) * c + j] += s;
          }
        }
        break;
      }
      case Op::Concat: {
        const Tensor& A = val(n.a);
        const Tensor& B = val(n.b);
        if (n.axis == 0) {
          for (size_t i = 0; i < A.data.size(); ++i) nodes_[n.a].grad[i] += g[i];
          for (size_t i = 0; i < B.data.size(); ++i) nodes_[n.b].grad[i] += g[A.data.size() + i];
        } else {
          int rows = A.shape.d[0], ca = A.shape.d[1], cb = B.shape.d[1];
          for (int r = 0; r < rows; ++r) {
            for (int j = 0; j < ca; ++j)
              nodes_[n.a].grad[size_t(r) * ca + j] += g[size_t(r) * (ca + cb) + j];
            for (int j = 0; j < cb; ++j)
              nodes_[n.b].grad[size_t(r) * cb + j] += g[size_t(r) * (ca + cb) + ca + j];
          }
        }
        break;
      }
      case Op::Slice: {
        const Shape& as = val(n.a).shape;
        int s[3], o[3];
        padded(as, s);
        padded(n.val.shape, o);
        for (int i0 = 0; i0 < o[0]; ++i0)
          for (int i1 = 0; i1 < o[1]; ++i1)
            for (int i2 = 0; i2 < o[2]; ++i2) {
              int j[3] = {i0, i1, i2};
              j[n.axis] += n.begin;
              nodes_[n.a].grad[(size_t(j[0]) * s[1] + j[1]) * s[2] + j[2]] +=
                  g[(size_t(i0) * o[1] + i1) * o[2] + i2];
            }
        break;
      }
      case Op::Scale:
        for (size_t i = 0; i < g.size(); ++i) nodes_[n.a].grad[i] += n.alpha * g[i];
        break;
      case Op::Rank1: {
        const Tensor& V = val(n.a);
        const Tensor& X = val(n.b);
        int rows = X.shape.d[0], d = X.shape.d[1];
        std::vector<double> s(d, 0.0), t(d, 0.0);
        for (int r = 0; r < rows; ++r)
          for (int j = 0; j < d; ++j) {
            s[j] += V.data[r] * X.data[size_t(r) * d + j];
            t[j] += V.data[r] * g[size_t(r) * d + j];
          }
        // d/dv = G s + X t, d/dX = v t'
        for (int r = 0; r < rows; ++r) {
          double gv = 0.0;
          for (int j = 0; j < d; ++j) {
            gv += g[size_t(r) * d + j] * s[j] + X.data[size_t(r) * d + j] * t[j];
            nodes_[n.b].grad[size_t(r) * d + j] += V.data[r] * t[j];
          }
          nodes_[n.a].grad[r] += gv;
        }
        break;
      }
      case Op::Reshape:
        for (size_t i = 0; i < g.size(); ++i) nodes_[n.a].grad[i] += g[i];
        break;
    }
  }
}

}  // namespace spe
