// Benchmark: the OpenMP trial fan-out against its serial reference. Both
// paths must report identical counts; the table shows wall time and speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "qkdtk/cinfo.hpp"
#include "qkdtk/mc.hpp"
#include "qkdtk/randkit.hpp"

namespace {

// one trial: does the empirical distribution of a 1000-sample draw leave the
// 0.05-ball around the source? (the workload the verification suites run)
bool trial(std::size_t, qkdtk::randkit::Stream& s) {
  const std::size_t n = 1000;
  double count = 0.0;
  for (std::size_t i = 0; i < n; ++i) count += s.bernoulli(0.3);
  return std::abs(count / double(n) - 0.3) > 0.05;
}

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
  const std::uint64_t seed = 12345;

  double t0 = now_ms();
  std::size_t serial =
      qkdtk::mc::count_successes_serial(trials, seed, "bench", trial);
  double t1 = now_ms();
  std::size_t parallel = qkdtk::mc::count_successes(trials, seed, "bench", trial);
  double t2 = now_ms();

  std::printf("trials            %zu\n", trials);
  std::printf("serial reference  %10.1f ms  count=%zu\n", t1 - t0, serial);
  std::printf("openmp fan-out    %10.1f ms  count=%zu\n", t2 - t1, parallel);
  std::printf("speedup           %10.2fx\n", (t1 - t0) / (t2 - t1));
  if (serial != parallel) {
    std::printf("MISMATCH: parallel count differs from serial reference\n");
    return 1;
  }
  std::printf("counts identical\n");
  return 0;
}
