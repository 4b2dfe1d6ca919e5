#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rglat/numeric.hpp"
#include "rglat/rng.hpp"
#include "rglat/transfer.hpp"

namespace rglat {

inline constexpr int kMaxScale = 40;

// Dissipation rule at the viscous scale N: either a fixed fraction alpha, or
// an i.i.d. uniform draw alpha_t ~ U[lo, hi] at every update of scale N.
// lo == hi is the deterministic case; a zero-width noise reproduces it
// bit-for-bit because lo + (hi - lo) * u == lo exactly.
struct Dissipation {
  double lo = 0.25;
  double hi = 0.25;

  static Dissipation deterministic(double alpha) { return {alpha, alpha}; }
  static Dissipation uniform(double lo, double hi) { return {lo, hi}; }

  bool is_deterministic() const { return lo == hi; }

  void validate() const {
    if (!(lo > 0.0) || !(lo <= hi) || !(hi <= 1.0))
      throw std::invalid_argument("dissipation requires 0 < lo <= hi <= 1");
  }
};

// The two noise laws used throughout the stochastic experiments.
inline constexpr Dissipation kNoiseMu{0.4, 0.5};
inline constexpr Dissipation kNoiseMuTilde{0.3, 0.301};

struct RegularizationSpec {
  int viscous_scale = 0;  // N
  Dissipation dissipation;

  void validate() const {
    if (viscous_scale < 0 || viscous_scale > kMaxScale)
      throw std::invalid_argument("viscous scale out of range");
    dissipation.validate();
  }
};

// Cumulative energy bookkeeping over a run. All three fields are
// non-decreasing; compensated sums keep the conservation identity exact to
// ~1e-13 even over billions of ticks.
struct EnergyLedger {
  KahanSum dissipated;
  KahanSum injected;
  KahanSum truncated;
};

struct SimConfig {
  TransferSpec transfer;
  RegularizationSpec reg;
  bool forcing = false;  // +1 into scale 0 at every unit-time update
  int n_cap = -1;        // storage cap; state vectors have n_cap + 1 entries

  void validate() const {
    reg.validate();
    if (n_cap < reg.viscous_scale || n_cap > kMaxScale)
      throw std::invalid_argument("n_cap must satisfy N <= n_cap <= kMaxScale");
  }
};

// Scale energies u_0..u_{n_cap} plus the fine-grid tick counter. Tick k is at
// time k * 2^-N; entry n holds the value assigned at the most recent multiple
// of 2^-n.
struct LatticeState {
  std::vector<double> values;
  std::uint64_t tick = 0;
};

struct NumericFault : std::runtime_error {
  std::uint64_t tick;
  int scale;
  NumericFault(std::uint64_t k, int n)
      : std::runtime_error("non-finite value at tick " + std::to_string(k) +
                           ", scale " + std::to_string(n)),
        tick(k),
        scale(n) {}
};

struct ConservationFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Smallest scale index updating at tick k; scales n_min..N update together.
// Scale n is due exactly when k * 2^-N is a multiple of 2^-n, i.e. when the
// 2-adic valuation of k is at least N - n.
inline int due_min(std::uint64_t k, int viscous_scale) {
  if (k == 0) return 0;
  const int v2 = std::countr_zero(k);
  return viscous_scale - std::min(v2, viscous_scale);
}

inline double total_energy(std::span<const double> values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

// One fine-grid step. Snapshot-synchronous: every transfer fraction is
// evaluated on the pre-tick values, then scales N down to n_min are assigned.
// The incoming term exists only for n > n_min. OnUpdate(n, value, value_tick)
// fires once per scale update with the tick index the new value belongs to.
template <class OnUpdate>
void tick(LatticeState& s, const SimConfig& cfg, RngStream* rng,
          EnergyLedger& ledger, OnUpdate&& on_update) {
  const int N = cfg.reg.viscous_scale;
  auto& u = s.values;
  const std::uint64_t k = s.tick;

  if (k == 0) {
    for (std::size_t n = static_cast<std::size_t>(N) + 1; n < u.size(); ++n) {
      if (u[n] != 0.0) {
        ledger.truncated.add(u[n]);
        u[n] = 0.0;
      }
    }
  }

  const int n_min = due_min(k, N);

  std::array<double, kMaxScale + 1> f;
  for (int n = n_min; n < N; ++n) f[n] = cfg.transfer.fraction(u[n], u[n + 1]);
  const Dissipation& d = cfg.reg.dissipation;
  if (d.is_deterministic()) {
    f[N] = d.lo;
  } else {
    if (rng == nullptr)
      throw std::invalid_argument("noise dissipation requires an RngStream");
    f[N] = rng->uniform(d.lo, d.hi);
  }

  ledger.dissipated.add(f[N] * u[N]);

  for (int n = N; n >= n_min; --n) {
    double nv = (1.0 - f[n]) * u[n];
    if (n > n_min) {
      nv += f[n - 1] * u[n - 1];
    } else if (n == 0 && cfg.forcing) {
      nv += 1.0;
      ledger.injected.add(1.0);
    }
    if (!std::isfinite(nv)) throw NumericFault(k, n);
    u[n] = nv;
    on_update(n, nv, k + (std::uint64_t{1} << (N - n)));
  }

  ++s.tick;
}

inline void tick(LatticeState& s, const SimConfig& cfg, RngStream* rng,
                 EnergyLedger& ledger) {
  tick(s, cfg, rng, ledger, [](int, double, std::uint64_t) {});
}

template <class OnUpdate>
void run_ticks(LatticeState& s, const SimConfig& cfg, RngStream* rng,
               EnergyLedger& ledger, std::uint64_t count, OnUpdate&& on_update) {
  for (std::uint64_t i = 0; i < count; ++i) tick(s, cfg, rng, ledger, on_update);
}

// sum(values) + dissipated + truncated - injected must equal the initial
// total throughout a run, to 1e-12 relative per elapsed unit time.
inline void check_conservation(const LatticeState& s, const EnergyLedger& ledger,
                               double initial_total, double elapsed_units) {
  const double account = total_energy(s.values) + ledger.dissipated.value() +
                         ledger.truncated.value() - ledger.injected.value();
  const double scale = initial_total + ledger.injected.value() + 1.0;
  const double tol = 1e-12 * scale * std::max(1.0, elapsed_units);
  if (std::abs(account - initial_total) > tol)
    throw ConservationFault("energy conservation violated: |" +
                            std::to_string(account - initial_total) + "| > " +
                            std::to_string(tol));
}

namespace detail {
inline LatticeState make_state(std::span<const double> a, int n_cap) {
  LatticeState s;
  s.values.assign(static_cast<std::size_t>(n_cap) + 1, 0.0);
  const std::size_t n = std::min(s.values.size(), a.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a[i] >= 0.0) || !std::isfinite(a[i]))
      throw std::domain_error("initial state must be finite and >= 0");
    s.values[i] = a[i];
  }
  return s;
}
}  // namespace detail

// Evaluate the flow over one large-scale turnover time: exactly 2^N ticks.
// With deterministic dissipation this is the flow map phi^(N,alpha); with
// noise it is one sample of the flow kernel.
inline std::vector<double> step_unit_interval(std::span<const double> a,
                                              const SimConfig& cfg, RngStream* rng,
                                              EnergyLedger& ledger) {
  cfg.validate();
  if (!cfg.reg.dissipation.is_deterministic() && rng == nullptr)
    throw std::invalid_argument("noise dissipation requires an RngStream");
  LatticeState s = detail::make_state(a, cfg.n_cap);
  const double initial_total = total_energy(s.values);
  const std::uint64_t ticks = std::uint64_t{1} << cfg.reg.viscous_scale;
  run_ticks(s, cfg, rng, ledger, ticks, [](int, double, std::uint64_t) {});
  check_conservation(s, ledger, initial_total, 1.0);
  return std::move(s.values);
}

inline std::vector<double> step_unit_interval(std::span<const double> a,
                                              const SimConfig& cfg,
                                              RngStream* rng = nullptr) {
  EnergyLedger ledger;
  return step_unit_interval(a, cfg, rng, ledger);
}

struct TrajectoryRecord {
  int scale;
  std::uint64_t value_tick;  // time = value_tick * 2^-N
  double value;
};

struct SimulateResult {
  std::vector<TrajectoryRecord> records;
  EnergyLedger ledger;
  LatticeState final_state;
  double initial_total = 0.0;
};

// Run t_end unit times, recording probed scales at their native update times.
// The conservation identity is checked at every unit-time boundary.
inline SimulateResult simulate(std::span<const double> a, const SimConfig& cfg,
                               int t_end, std::span<const int> probe_scales,
                               RngStream* rng = nullptr) {
  cfg.validate();
  if (t_end < 1) throw std::invalid_argument("simulate: t_end must be >= 1");
  if (!cfg.reg.dissipation.is_deterministic() && rng == nullptr)
    throw std::invalid_argument("noise dissipation requires an RngStream");
  SimulateResult out;
  LatticeState s = detail::make_state(a, cfg.n_cap);
  out.initial_total = total_energy(s.values);

  std::array<bool, kMaxScale + 1> probed{};
  for (int n : probe_scales) {
    if (n < 0 || n > cfg.n_cap) throw std::invalid_argument("probe scale out of range");
    probed[n] = true;
  }

  const std::uint64_t per_unit = std::uint64_t{1} << cfg.reg.viscous_scale;
  for (int t = 0; t < t_end; ++t) {
    run_ticks(s, cfg, rng, out.ledger, per_unit,
              [&](int n, double v, std::uint64_t vt) {
                if (probed[n]) out.records.push_back({n, vt, v});
              });
    check_conservation(s, out.ledger, out.initial_total, t + 1.0);
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace rglat
