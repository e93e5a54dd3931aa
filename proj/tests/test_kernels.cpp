#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "spe/kernels.hpp"
#include "spe/matrix.hpp"
#include "spe/rng.hpp"

using namespace spe;

namespace {

std::vector<double> random_vec(size_t n, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  return v;
}

}  // namespace

TEST_CASE("serial and omp matmul agree bitwise") {
  for (auto [m, k, n] : std::vector<std::array<int, 3>>{{1, 1, 1},
                                                        {3, 5, 2},
                                                        {17, 31, 13},
                                                        {64, 64, 64},
                                                        {100, 3, 100}}) {
    std::vector<double> a = random_vec(size_t(m) * k, 1), b = random_vec(size_t(k) * n, 2);
    std::vector<double> c1(size_t(m) * n), c2(size_t(m) * n);
    kern::matmul_serial(a.data(), b.data(), c1.data(), m, k, n);
    kern::matmul_omp(a.data(), b.data(), c2.data(), m, k, n);
    CHECK(c1 == c2);  // exact: same per-row helper, parallelism over outputs only
  }
}

TEST_CASE("serial and omp transposed matmuls agree bitwise") {
  int m = 23, k = 17, n = 29;
  std::vector<double> a = random_vec(size_t(k) * m, 3), b = random_vec(size_t(k) * n, 4);
  std::vector<double> c1(size_t(m) * n), c2(size_t(m) * n);
  kern::matmul_at_b_serial(a.data(), b.data(), c1.data(), k, m, n);
  kern::matmul_at_b_omp(a.data(), b.data(), c2.data(), k, m, n);
  CHECK(c1 == c2);

  std::vector<double> a2 = random_vec(size_t(m) * k, 5), b2 = random_vec(size_t(n) * k, 6);
  kern::matmul_a_bt_serial(a2.data(), b2.data(), c1.data(), m, k, n);
  kern::matmul_a_bt_omp(a2.data(), b2.data(), c2.data(), m, k, n);
  CHECK(c1 == c2);
}

TEST_CASE("matmul against a plain triple loop") {
  int m = 9, k = 11, n = 7;
  std::vector<double> a = random_vec(size_t(m) * k, 10), b = random_vec(size_t(k) * n, 11);
  std::vector<double> want(size_t(m) * n, 0.0), got(size_t(m) * n);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < k; ++l)
      for (int j = 0; j < n; ++j) want[size_t(i) * n + j] += a[size_t(i) * k + l] * b[size_t(l) * n + j];
  kern::matmul(a.data(), b.data(), got.data(), m, k, n);
  for (size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("rotation rounds agree bitwise between variants") {
  int n = 32;
  std::vector<double> m1 = random_vec(size_t(n) * n, 20), m2 = m1, m3 = m1;
  std::vector<kern::Rotation> rots;
  for (int p = 0; p < n / 2; ++p) rots.push_back({p, n - 1 - p, 0.28, 0.96});  // c^2+s^2=1
  kern::rotate_rows_serial(m1.data(), n, rots.data(), int(rots.size()));
  kern::rotate_rows_omp(m2.data(), n, rots.data(), int(rots.size()));
  CHECK(m1 == m2);
  kern::rotate_cols_serial(m3.data(), n, n, rots.data(), int(rots.size()));
  std::vector<double> m4 = random_vec(size_t(n) * n, 20);
  kern::rotate_cols_omp(m4.data(), n, n, rots.data(), int(rots.size()));
  CHECK(m3 == m4);
}

TEST_CASE("rotate_rows applies the plane rotation") {
  // 2x2: rows p,q mix as rp' = c rp - s rq, rq' = s rp + c rq
  std::vector<double> m = {1.0, 2.0, 3.0, 4.0};
  kern::Rotation r{0, 1, 0.6, 0.8};
  kern::rotate_rows(m.data(), 2, &r, 1);
  CHECK(m[0] == doctest::Approx(0.6 * 1.0 - 0.8 * 3.0));
  CHECK(m[1] == doctest::Approx(0.6 * 2.0 - 0.8 * 4.0));
  CHECK(m[2] == doctest::Approx(0.8 * 1.0 + 0.6 * 3.0));
  CHECK(m[3] == doctest::Approx(0.8 * 2.0 + 0.6 * 4.0));
}

TEST_CASE("offdiag_sq sums squared off-diagonal entries") {
  std::vector<double> m = {1.0, 2.0, -3.0, 5.0};
  CHECK(kern::offdiag_sq(m.data(), 2) == doctest::Approx(4.0 + 9.0));
}

TEST_CASE("thread cap can be pinned and restored") {
  int before = kern::thread_cap();
  kern::set_thread_cap(1);
  CHECK(kern::thread_cap() == 1);
  // results must not depend on the cap
  int n = 48;
  std::vector<double> a = random_vec(size_t(n) * n, 30), b = random_vec(size_t(n) * n, 31);
  std::vector<double> c1(size_t(n) * n), c2(size_t(n) * n);
  kern::matmul(a.data(), b.data(), c1.data(), n, n, n);
  kern::set_thread_cap(4);
  kern::matmul(a.data(), b.data(), c2.data(), n, n, n);
  CHECK(c1 == c2);
  kern::set_thread_cap(before);
}
