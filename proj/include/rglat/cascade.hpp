#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rglat/lattice.hpp"
#include "rglat/numeric.hpp"

namespace rglat {

// Time averages S_p(2^-n) = <u_n(t)^p> over each scale's native update
// times, accumulated in a streaming pass (no trajectory storage).
struct StructureFunctionTable {
  int viscous_scale = 0;
  int p_max = 8;
  std::vector<std::vector<double>> values;  // values[n][p-1] = S_p at scale n
  std::vector<std::uint64_t> samples;       // native-time samples per scale
};

struct ForcedRunResult {
  StructureFunctionTable table;
  EnergyLedger ledger;
  std::vector<double> final_state;
  double initial_total = 0.0;
  double transient = 0.0;
  double window = 0.0;
  double dissipated_in_window = 0.0;
  double injected_in_window = 0.0;
};

// Statistically steady forced run: discard `transient` unit times, then
// average u_n^p at native times over `window` unit times.
ForcedRunResult forced_steady_run(const SimConfig& config, std::span<const double> a,
                                  int transient, int window, int p_max,
                                  RngStream* rng = nullptr);

struct ZetaFit {
  std::vector<double> zeta;     // zeta[p-1]
  std::vector<double> stderr_;  // fit standard error per order
  std::vector<double> r2;
  int n_lo = 0;
  int n_hi = 0;
};

// Least-squares power-law exponents: slope of log S_p vs log(2^-n) on the
// inertial range [n_lo, n_hi].
ZetaFit fit_zeta(const StructureFunctionTable& table, int n_lo, int n_hi);

struct FluxReport {
  double injection_rate = 0.0;    // injected per unit time over the window
  double dissipation_rate = 0.0;  // dissipated per unit time over the window
  double balance_ratio = 0.0;     // dissipation / injection
  std::vector<int> scales;
  std::vector<double> mean_energy;  // <u_n>
  std::vector<double> flux_proxy;   // <u_n> / tau_n
  double proxy_loglog_slope = 0.0;  // slope of log <u_n> vs log tau_n
};

// Mean injection and dissipation rates over the averaging window plus the
// <u_n>/tau_n energy-flux proxy across the inertial range.
FluxReport flux_balance_check(const ForcedRunResult& run, int n_lo, int n_hi);

}  // namespace rglat
