// Times the serial reference sampler against the OpenMP one and reports the
// raw tick rate of the integrator. Not part of the test suite.

#include <chrono>
#include <cstdio>
#include <vector>

#include "rglat/experiments.hpp"
#include "rglat/stochastic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rglat;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  int N = 14;
  std::size_t samples = 2000;
  if (argc > 1) N = std::atoi(argv[1]);
  if (argc > 2) samples = static_cast<std::size_t>(std::atoll(argv[2]));

  const int n_cap = N + 4;
  const TransferSpec spec{TransferFamily::FB, 10.3};
  const auto a = make_initial_condition("staircase", n_cap);
  const std::vector<int> components{0, 1, 2, 3, 4};
  const double ticks = static_cast<double>(samples) * static_cast<double>(1ull << N);

  std::printf("N=%d samples=%zu (%.3g ticks per pass)\n", N, samples, ticks);

  auto t0 = std::chrono::steady_clock::now();
  const SampleSet serial = sample_kernel_serial(a, N, kNoiseMu, spec, samples, 1234,
                                                components, n_cap);
  const double serial_s = seconds_since(t0);
  std::printf("serial   : %8.3f s  %6.1f ns/tick\n", serial_s, 1e9 * serial_s / ticks);

  int max_threads = 1;
#ifdef _OPENMP
  max_threads = omp_get_max_threads();
#endif
  for (int threads = 1; threads <= max_threads; threads *= 2) {
    t0 = std::chrono::steady_clock::now();
    const SampleSet parallel = sample_kernel(a, N, kNoiseMu, spec, samples, 1234,
                                             components, n_cap, threads);
    const double par_s = seconds_since(t0);
    bool identical = true;
    for (std::size_t c = 0; c < serial.columns.size(); ++c)
      identical = identical && serial.columns[c] == parallel.columns[c];
    std::printf("threads=%d: %8.3f s  %6.1f ns/tick  speedup %.2fx  %s\n", threads,
                par_s, 1e9 * par_s / ticks, serial_s / par_s,
                identical ? "bit-identical" : "MISMATCH");
  }
  return 0;
}
