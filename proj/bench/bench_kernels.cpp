// Timing comparison of the serial and OpenMP kernel variants, plus a full
// eigendecomposition. The two variants must agree bitwise; the table reports
// the speedup actually obtained on this machine.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "spe/eig.hpp"
#include "spe/generators.hpp"
#include "spe/graph.hpp"
#include "spe/kernels.hpp"
#include "spe/rng.hpp"

using Clock = std::chrono::steady_clock;

static double time_ms(const std::function<void()>& f, int reps) {
  f();  // warm up
  auto t0 = Clock::now();
  for (int i = 0; i < reps; ++i) f();
  auto t1 = Clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

int main() {
  std::printf("threads: %d\n\n", spe::kern::thread_cap());
  std::printf("%-28s %10s %10s %8s %s\n", "kernel", "serial ms", "omp ms", "speedup", "match");

  spe::Rng rng(7);
  for (int n : {64, 128, 256, 512}) {
    std::vector<double> a(size_t(n) * n), b(size_t(n) * n), c1(size_t(n) * n), c2(size_t(n) * n);
    for (double& v : a) v = rng.gaussian();
    for (double& v : b) v = rng.gaussian();
    int reps = n <= 128 ? 20 : 5;
    double ts = time_ms([&] { spe::kern::matmul_serial(a.data(), b.data(), c1.data(), n, n, n); },
                        reps);
    double tp =
        time_ms([&] { spe::kern::matmul_omp(a.data(), b.data(), c2.data(), n, n, n); }, reps);
    char label[64];
    std::snprintf(label, sizeof label, "matmul %dx%d", n, n);
    std::printf("%-28s %10.3f %10.3f %7.2fx %s\n", label, ts, tp, ts / tp,
                c1 == c2 ? "yes" : "NO");
  }

  for (int n : {256, 512}) {
    std::vector<double> m1(size_t(n) * n), m2;
    for (double& v : m1) v = rng.gaussian();
    m2 = m1;
    // one disjoint tournament round of n/2 rotations
    std::vector<spe::kern::Rotation> rots;
    for (int p = 0; p < n / 2; ++p) rots.push_back({p, n - 1 - p, 0.8, 0.6});
    int reps = 50;
    double ts = time_ms(
        [&] { spe::kern::rotate_rows_serial(m1.data(), n, rots.data(), int(rots.size())); }, reps);
    double tp = time_ms(
        [&] { spe::kern::rotate_rows_omp(m2.data(), n, rots.data(), int(rots.size())); }, reps);
    char label[64];
    std::snprintf(label, sizeof label, "rotation round n=%d", n);
    std::printf("%-28s %10.3f %10.3f %7.2fx %s\n", label, ts, tp, ts / tp,
                m1 == m2 ? "yes" : "NO");
  }

  {
    spe::Graph g = spe::gen_grid(16, 16);
    spe::SymMatrix L = spe::normalized_laplacian(g);
    auto t0 = Clock::now();
    spe::EigDecomp e = spe::eigh(L);
    auto t1 = Clock::now();
    std::printf("\neigh grid(16,16), n=%d: %.1f ms, lambda_max=%.6f\n", e.n(),
                std::chrono::duration<double, std::milli>(t1 - t0).count(), e.values.back());
  }
  return 0;
}
