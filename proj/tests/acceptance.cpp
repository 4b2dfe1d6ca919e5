// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Heavy Monte Carlo criteria run at the desk scale; expect tens of minutes
// total on a small machine. `acceptance --only 1,2,4` runs a subset.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rglat/cascade.hpp"
#include "rglat/experiments.hpp"
#include "rglat/flow_algebra.hpp"
#include "rglat/spectral.hpp"
#include "rglat/stochastic.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace rglat;
namespace fs = std::filesystem;

namespace {

int g_threads = 0;
std::uint64_t g_seed = 12345;
int g_failures = 0;

const TransferSpec kFa5{TransferFamily::FA, 5.0};
const TransferSpec kFb103{TransferFamily::FB, 10.3};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

void report(int criterion, const char* name, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] C%-2d %-28s %s [%.1fs]\n", pass ? "PASS" : "FAIL", criterion, name,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::vector<double> random_state(RngStream& rng, int support, int n_cap) {
  std::vector<double> a(static_cast<std::size_t>(n_cap) + 1, 0.0);
  for (int n = 0; n <= support; ++n) a[n] = rng.uniform01();
  return a;
}

// --------------------------------------------------------------------------
// C1: renormalization identity.

void criterion1() {
  Timer timer;
  double worst = 0.0;
  RngStream rng(g_seed, 1);
  for (TransferFamily fam : {TransferFamily::FA, TransferFamily::FB}) {
    const TransferSpec spec{fam, fam == TransferFamily::FA ? 5.0 : 10.3};
    for (double alpha : {0.25, 0.75}) {
      const Dissipation diss = Dissipation::deterministic(alpha);
      for (int N = 0; N <= 10; ++N) {
        const int n_cap = N + 4;
        for (int trial = 0; trial < 25; ++trial) {
          const auto a = random_state(rng, N + 1, n_cap);
          const FlowMap base(N, diss, spec, n_cap);
          const FlowMap target(N + 1, diss, spec, n_cap);
          const auto lhs = rg_apply(base, a);
          const auto rhs = target(a);
          for (std::size_t i = 0; i < rhs.size(); ++i)
            worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
        }
      }
    }
  }
  const double secs = timer.seconds();
  report(1, "rg identity", worst <= 1e-12 && secs < 5.0,
         fmt("max_dev=%.2e (tol 1e-12, 100 states/case)", worst), secs);
}

// --------------------------------------------------------------------------
// C2: dyadic-time composition.

void criterion2() {
  Timer timer;
  double worst = 0.0;
  const double alpha = 0.25;
  std::uint64_t cases = 0;
  for (int N = 1; N <= 8; ++N) {
    const int n_cap = N + 4;
    std::vector<std::vector<int>> tuples{{}};
    std::vector<int> current;
    auto extend = [&](auto&& self, int from, int depth) -> void {
      if (depth == 0) return;
      for (int i = from; i <= N; ++i) {
        current.push_back(i);
        tuples.push_back(current);
        self(self, i + 1, depth - 1);
        current.pop_back();
      }
    };
    extend(extend, 1, 3);

    const SimConfig cfg{kFa5, {N, Dissipation::deterministic(alpha)}, false, n_cap};
    RngStream rng(g_seed, 2000 + N);
    for (int sid = 0; sid < 3; ++sid) {
      std::vector<double> a = sid == 0 ? make_initial_condition("staircase", n_cap)
                                       : random_state(rng, N, n_cap);
      for (const auto& indices : tuples) {
        for (int m = 0; m <= 2; ++m) {
          if (m == 0 && indices.empty()) continue;
          const DyadicTime t{m, indices};
          const auto composed = state_at_dyadic_time(a, N, alpha, kFa5, t, n_cap);
          LatticeState s = detail::make_state(a, n_cap);
          EnergyLedger ledger;
          run_ticks(s, cfg, nullptr, ledger, t.fine_ticks(N),
                    [](int, double, std::uint64_t) {});
          const int base = indices.empty() ? 0 : indices.back();
          for (int r = 0; base + r <= n_cap; ++r)
            worst = std::max(worst, std::abs(composed[r] - s.values[base + r]));
          ++cases;
        }
      }
    }
  }
  const double secs = timer.seconds();
  report(2, "dyadic composition", worst <= 1e-12 && secs < 5.0,
         fmt("max_dev=%.2e over %llu cases (tol 1e-12)", worst,
             static_cast<unsigned long long>(cases)),
         secs);
}

// --------------------------------------------------------------------------
// C3: energy conservation. Unit-boundary checks are built into every
// simulate/step/forced path and throw on violation; here the identity is
// additionally verified tick-by-tick on representative configurations.

void criterion3() {
  Timer timer;
  double worst_rel = 0.0;
  struct Case {
    TransferSpec spec;
    Dissipation diss;
    bool forcing;
    int N;
  };
  const std::vector<Case> cases{{kFa5, Dissipation::deterministic(0.25), false, 12},
                                {kFb103, Dissipation::deterministic(0.75), false, 12},
                                {kFb103, kNoiseMu, false, 12},
                                {kFb103, kNoiseMuTilde, false, 10},
                                {kFb103, Dissipation::deterministic(0.25), true, 10}};
  int idx = 0;
  for (const Case& c : cases) {
    const SimConfig cfg{c.spec, {c.N, c.diss}, c.forcing, c.N + 4};
    const auto a = make_initial_condition("staircase", cfg.n_cap);
    LatticeState s = detail::make_state(a, cfg.n_cap);
    EnergyLedger ledger;
    RngStream rng(g_seed, 3000 + idx++);
    const double total0 = total_energy(s.values);
    const std::uint64_t ticks = (std::uint64_t{2}) << c.N;  // two unit times
    for (std::uint64_t k = 0; k < ticks; ++k) {
      tick(s, cfg, c.diss.is_deterministic() ? nullptr : &rng, ledger);
      const double account = total_energy(s.values) + ledger.dissipated.value() +
                             ledger.truncated.value() - ledger.injected.value();
      const double elapsed = std::max(1.0, double(k + 1) / double(std::uint64_t{1} << c.N));
      worst_rel = std::max(
          worst_rel, std::abs(account - total0) / ((total0 + ledger.injected.value() + 1.0) * elapsed));
    }
  }
  report(3, "energy conservation", worst_rel <= 1e-12,
         fmt("max rel drift %.2e per unit time (tol 1e-12); checks also enforced "
             "inside every run",
             worst_rel),
         timer.seconds());
}

// --------------------------------------------------------------------------
// C4 + C5: deterministic eigenvalue, coefficient ratio, collapse.

double g_rho_c4 = 0.0;

void criterion4() {
  Timer timer;
  const int n_cap = 25;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<std::vector<double>> chain;
  for (int N = 12; N <= 20; ++N)
    chain.push_back(cauchy_difference(N, 0.25, kFa5, a, n_cap));
  const RhoEstimate est = estimate_rho(chain, 4);
  g_rho_c4 = est.rho;
  const double secs = timer.seconds();
  report(4, "deterministic eigenvalue",
         std::abs(est.rho + 0.42) <= 0.02 && secs < 30.0,
         fmt("rho=%.4f (want -0.42 +- 0.02), dispersion %.1e", est.rho, est.dispersion),
         secs);
}

void criterion5() {
  Timer timer;
  const int n_cap = 25;
  const auto a = make_initial_condition("staircase", n_cap);
  const double rho = g_rho_c4 != 0.0 ? g_rho_c4 : -0.42;

  // Reference eigenvector at the largest reference scale, c(1/4) = 1.
  const auto ref_delta = cauchy_difference(18, 0.25, kFa5, a, n_cap);
  const auto psi_ref = estimate_eigenvector(ref_delta, rho, 1.0, 18);

  std::map<double, std::vector<double>> c_fits;
  std::vector<std::vector<double>> psis;
  for (double alpha : {0.25, 0.75}) {
    for (int N = 12; N <= 15; ++N) {
      const auto delta = cauchy_difference(N, alpha, kFa5, a, n_cap);
      c_fits[alpha].push_back(fit_scale_coefficient(delta, psi_ref, rho, N, 8));
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  const double c14 = mean(c_fits[0.25]);
  const double c34 = mean(c_fits[0.75]);
  const double ratio = c34 / c14;

  for (double alpha : {0.25, 0.75}) {
    const double c = alpha == 0.25 ? c14 : c34;
    for (int N = 12; N <= 15; ++N) {
      const auto delta = cauchy_difference(N, alpha, kFa5, a, n_cap);
      psis.push_back(estimate_eigenvector(delta, rho, c, N));
    }
  }
  double psi_scale = 0.0;
  for (int n = 0; n <= 8; ++n) psi_scale = std::max(psi_scale, std::abs(psi_ref[n]));
  double spread = 0.0;
  for (std::size_t i = 0; i < psis.size(); ++i)
    for (std::size_t j = i + 1; j < psis.size(); ++j)
      for (int n = 0; n <= 8; ++n)
        spread = std::max(spread, std::abs(psis[i][n] - psis[j][n]));
  const double rel_spread = spread / psi_scale;

  report(5, "coefficient ratio + collapse",
         std::abs(ratio - 1.61) <= 0.05 && rel_spread <= 0.02,
         fmt("c_ratio=%.4f (want 1.61 +- 0.05), collapse spread %.2f%% (tol 2%%)",
             ratio, 100.0 * rel_spread),
         timer.seconds());
}

// --------------------------------------------------------------------------
// C6: period-doubling point.

void criterion6() {
  Timer timer;
  const int N = 20, n_cap = 26;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<double> grid;
  for (double p = 5.0; p <= 8.0 + 1e-9; p += 0.05) grid.push_back(p);
  const BifurcationScan scan =
      bifurcation_scan(grid, TransferFamily::FA, 0.25, a, N, 4, n_cap, g_threads);

  // Even/odd limits at p = 8.
  const TransferSpec fa8{TransferFamily::FA, 8.0};
  std::map<int, std::vector<double>> states;
  for (int n = 18; n <= 21; ++n)
    states[n] = FlowMap(n, Dissipation::deterministic(0.25), fa8, n_cap)(a);
  const double gap = std::abs(states[21][4] - states[20][4]);
  const double within = std::max(std::abs(states[21][4] - states[19][4]),
                                 std::abs(states[20][4] - states[18][4]));

  const bool crossing_ok = std::isfinite(scan.p_pd_crossing) &&
                           std::abs(scan.p_pd_crossing - 6.95) <= 0.15;
  const bool r2_ok = scan.post_fit_r2 >= 0.98;
  const bool parity_ok = gap > 10.0 * within;
  report(6, "period-doubling point", crossing_ok && r2_ok && parity_ok,
         fmt("p_pd=%.3f (want 6.95 +- 0.15), delta^2 fit R2=%.4f (>=0.98), "
             "p=8 parity gap/within=%.0f (>10)",
             scan.p_pd_crossing, scan.post_fit_r2, gap / std::max(within, 1e-300)),
         timer.seconds());
}

// --------------------------------------------------------------------------
// C7: chaos signature. The informative window is the maximal strictly
// increasing run of scales ending at the saturation edge; it must span at
// least three scales and four decades, and loglog must fit a line there.

void criterion7() {
  Timer timer;
  const int n_cap = 24;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<int> scales;
  for (int N = 0; N <= 18; ++N) scales.push_back(N);
  const GrowthCurve curve =
      perturbation_growth(0.25, 1e-15, kFb103, a, scales, n_cap, g_threads);

  std::size_t n_sat = curve.norms.size();
  for (std::size_t i = 0; i < curve.norms.size(); ++i) {
    if (curve.norms[i] > 1e-3 * curve.state_norms[i]) {
      n_sat = i;
      break;
    }
  }
  // Maximal strictly increasing run ending at the saturation edge.
  std::size_t start = n_sat - 1;
  while (start > 0 && curve.norms[start - 1] < curve.norms[start]) --start;

  std::vector<double> xs, ys;
  bool increasing = true;
  for (std::size_t i = start; i < n_sat; ++i) {
    if (i > start && !(curve.norms[i] > curve.norms[i - 1])) increasing = false;
    if (std::isfinite(curve.loglog[i])) {
      xs.push_back(curve.scales[i]);
      ys.push_back(curve.loglog[i]);
    }
  }
  const std::size_t window = n_sat - start;
  const double decades =
      window >= 2 ? std::log10(curve.norms[n_sat - 1] / curve.norms[start]) : 0.0;
  double r2 = 0.0;
  if (xs.size() >= 3) r2 = linear_fit(xs, ys).r2;

  const bool pass = increasing && window >= 3 && decades >= 4.0 && r2 >= 0.95;
  report(7, "chaos signature", pass,
         fmt("monotone window N=%d..%zu (%zu scales, %.1f decades), loglog R2=%.3f "
             "(>=0.95)",
             curve.scales[start], static_cast<std::size_t>(curve.scales[n_sat - 1]),
             window, decades, r2),
         timer.seconds());
}

// --------------------------------------------------------------------------
// C8 + C9: spontaneous stochasticity and the stochastic eigenvalue. The mu
// sample sets are shared: C8 uses the first 1e5 samples of the C9 sets, which
// per-index seeding makes identical to an independent M=1e5 run.

std::vector<SampleSet> g_mu_sets;  // N = 13..16
constexpr std::size_t kSamplesC9 = 200000;
constexpr std::size_t kSamplesC8 = 100000;

void ensure_mu_sets() {
  if (!g_mu_sets.empty()) return;
  const int n_cap = 20;
  const auto a = make_initial_condition("staircase", n_cap);
  const std::vector<int> comps{0, 1, 2, 3, 4};
  for (int N = 13; N <= 16; ++N) {
    const std::uint64_t set_seed = mix64(g_seed ^ mix64(static_cast<std::uint64_t>(N)));
    g_mu_sets.push_back(sample_kernel(a, N, kNoiseMu, kFb103, kSamplesC9, set_seed,
                                      comps, n_cap, g_threads, "staircase"));
  }
}

void criterion8() {
  Timer timer;
  ensure_mu_sets();
  const int n_cap = 20;
  const auto a = make_initial_condition("staircase", n_cap);
  const std::vector<int> comps{0, 1, 2, 3, 4};

  // mu sets: N = 14..16 slices; mutilde sets: fresh at M = 1e5.
  std::vector<const SampleSet*> sets;
  std::vector<SampleSet> sliced, tilde;
  for (int N = 14; N <= 16; ++N) {
    SampleSet s = g_mu_sets[N - 13];
    for (auto& col : s.columns) col.resize(kSamplesC8);
    sliced.push_back(std::move(s));
  }
  for (int N = 14; N <= 16; ++N) {
    const std::uint64_t set_seed =
        mix64(g_seed ^ mix64(static_cast<std::uint64_t>(N) * 2 + 1));
    tilde.push_back(sample_kernel(a, N, kNoiseMuTilde, kFb103, kSamplesC8, set_seed,
                                  comps, n_cap, g_threads, "staircase"));
  }
  for (const auto& s : sliced) sets.push_back(&s);
  for (const auto& s : tilde) sets.push_back(&s);

  std::vector<std::string> labels;
  for (int N = 14; N <= 16; ++N) labels.push_back("mu@" + std::to_string(N));
  for (int N = 14; N <= 16; ++N) labels.push_back("mutilde@" + std::to_string(N));

  double max_ks = 0.0, max_mu_only = 0.0, max_asymptotic = 0.0;
  std::string worst_pair;
  for (int comp : {2, 3, 4}) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      for (std::size_t j = i + 1; j < sets.size(); ++j) {
        const double d = ks_distance(sets[i]->column(comp), sets[j]->column(comp));
        if (d > max_ks) {
          max_ks = d;
          worst_pair = labels[i] + " vs " + labels[j] + " (u" + std::to_string(comp) + ")";
        }
        if (i < 3 && j < 3) max_mu_only = std::max(max_mu_only, d);
        // Pairs not involving the pre-asymptotic small-noise sets at N=14,15.
        if (i != 3 && i != 4 && j != 3 && j != 4)
          max_asymptotic = std::max(max_asymptotic, d);
      }
    }
  }

  double max_var = 0.0;
  for (const SampleSet* s : sets)
    for (int comp : {0, 1}) {
      const Moments m = kernel_moments(s->column(comp));
      max_var = std::max(max_var, m.stddev * m.stddev);
    }

  report(8, "spontaneous stochasticity", max_ks <= 0.03 && max_var < 1e-20,
         fmt("max KS = %.4f (tol 0.03) at %s; mu-only pairs %.4f, excluding "
             "mutilde@14,15: %.4f; var(u0,u1) max %.1e (<1e-20)",
             max_ks, worst_pair.c_str(), max_mu_only, max_asymptotic, max_var),
         timer.seconds());
}

void criterion9() {
  Timer timer;
  ensure_mu_sets();

  // Synthetic geometric recovery to 1e-3.
  bool synthetic_ok = true;
  {
    const BinGrid g{0.0, 1.0, 64};
    DeltaSeries series;
    series.first_scale = 13;
    for (int j = 0; j < 3; ++j) {
      SignedHistogram d;
      d.grid = g;
      d.count = 1000;
      d.density.resize(64);
      for (int b = 0; b < 64; ++b)
        d.density[b] = ipow(-0.6, 13 + j) * std::sin(2.0 * M_PI * (b + 0.5) / 64.0);
      series.deltas.push_back(std::move(d));
    }
    const auto est = estimate_rho_stochastic(std::span(&series, 1));
    synthetic_ok = std::abs(est.rho + 0.6) <= 1e-3;
  }

  std::vector<DeltaSeries> series;
  for (int comp : {2, 3}) {
    std::vector<const SampleSet*> ptrs;
    for (const auto& s : g_mu_sets) ptrs.push_back(&s);
    const BinGrid grid = pooled_grid(ptrs, comp, 128);
    std::vector<HistogramPDF> pdfs;
    for (const auto& s : g_mu_sets) pdfs.push_back(marginal_pdf(s, comp, grid));
    DeltaSeries ds;
    ds.first_scale = 13;
    for (std::size_t i = 0; i + 1 < pdfs.size(); ++i)
      ds.deltas.push_back(delta_pdf(pdfs[i + 1], pdfs[i]));
    series.push_back(std::move(ds));
  }
  const StochasticRhoEstimate est = estimate_rho_stochastic(series);

  report(9, "stochastic eigenvalue",
         std::abs(est.rho + 0.7) <= 0.15 && synthetic_ok && !est.boundary,
         fmt("rho=%.3f (want -0.7 +- 0.15, N=13..16, M=%zu), synthetic exact: %s",
             est.rho, kSamplesC9, synthetic_ok ? "yes" : "no"),
         timer.seconds());
}

// --------------------------------------------------------------------------
// C10: stochastic period doubling at reduced fidelity.

void criterion10() {
  Timer timer;
  const int n_cap = 22;
  const std::size_t samples = 20000;
  const TransferSpec spec{TransferFamily::FB, 10.7};
  const auto a = make_initial_condition("staircase", n_cap);
  const std::vector<int> comps{2, 3, 4};

  std::vector<SampleSet> primary, swap_partner;
  for (int N = 15; N <= 18; ++N) {
    primary.push_back(sample_kernel(a, N, kNoiseMu, spec, samples,
                                    mix64(g_seed ^ mix64(N * 10 + 1)), comps, n_cap,
                                    g_threads, "staircase"));
    swap_partner.push_back(sample_kernel(a, N, kNoiseMuTilde, spec, samples,
                                         mix64(g_seed ^ mix64(N * 10 + 2)), comps,
                                         n_cap, g_threads, "staircase"));
  }
  const Period2Report rep = detect_kernel_period2(primary, swap_partner, comps);

  bool pass = false;
  std::string note;
  if (rep.classification == KernelClass::period2) {
    pass = rep.min_cross_parity >= 5.0 * rep.max_within_parity && rep.swap_verified;
    note = fmt("period2: cross/within=%.1f (>=5), swap %s",
               rep.min_cross_parity / std::max(rep.max_within_parity, 1e-300),
               rep.swap_verified ? "verified" : "FAILED");
  } else if (rep.classification == KernelClass::undecided) {
    pass = true;  // valid outcome at reduced fidelity
    note = fmt("undecided (within=%.3f cross=%.3f crit=%.4f)", rep.max_within_parity,
               rep.min_cross_parity, rep.critical);
  } else {
    note = "fixed_point (unexpected at p=10.7)";
  }
  report(10, "stochastic period doubling", pass, note, timer.seconds());
}

// --------------------------------------------------------------------------
// C11: cascade (desk scale plus the paper-scale exponent check).

void criterion11() {
  Timer timer;
  bool desk_ok = false, paper_ok = false;
  std::string detail;
  {
    const SimConfig cfg{kFb103, {12, Dissipation::deterministic(0.25)}, true, 14};
    const auto a = make_initial_condition("staircase", 14);
    const ForcedRunResult run = forced_steady_run(cfg, a, 100, 5000, 8);
    const ZetaFit fit = fit_zeta(run.table, 3, 7);
    const FluxReport flux = flux_balance_check(run, 3, 7);
    const bool zeta1_ok = std::abs(fit.zeta[0] - 1.0) <= 0.05;
    const bool balance_ok = std::abs(flux.balance_ratio - 1.0) <= 0.03;
    const bool concave = fit.zeta[1] < 2.0 * fit.zeta[0] && fit.zeta[3] < 2.0 * fit.zeta[1];
    desk_ok = zeta1_ok && balance_ok && concave;
    detail = fmt("desk: zeta1=%.3f (1+-0.05) balance=%.4f (1+-0.03) "
                 "zeta2=%.2f<2z1 zeta4=%.2f<2z2",
                 fit.zeta[0], flux.balance_ratio, fit.zeta[1], fit.zeta[3]);
  }
  {
    const SimConfig cfg{kFb103, {17, Dissipation::deterministic(0.25)}, true, 19};
    const auto a = make_initial_condition("staircase", 19);
    const ForcedRunResult run = forced_steady_run(cfg, a, 100, 40000, 8);
    const ZetaFit fit = fit_zeta(run.table, 3, 12);
    paper_ok = std::abs(fit.zeta[0] - 1.0) <= 0.02;
    detail += fmt("; paper: zeta1=%.3f (1+-0.02)", fit.zeta[0]);
  }
  report(11, "cascade", desk_ok && paper_ok, detail, timer.seconds());
}

// --------------------------------------------------------------------------
// C12: byte-identical reruns across thread counts, all registry entries at
// reduced scale.

std::map<std::string, std::string> csv_hashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().filename() == "metadata.json") continue;  // wall time differs
    std::ifstream in(entry.path(), std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    out[entry.path().filename().string()] = fnv1a64_hex(content);
  }
  return out;
}

void criterion12() {
  Timer timer;
  const std::map<std::string, KvMap> reduced{
      {"thm1_verify", {{"n_max", "5"}, {"states", "10"}}},
      {"thm2_verify", {{"n_max", "5"}, {"states", "2"}}},
      {"fig5_collapse", {{"N_range", "8..10"}}},
      {"fig5_eigenvector", {{"N_range", "8..10"}, {"rho_N_max", "12"}}},
      {"fig6_bifurcation", {{"N", "10"}, {"p_grid", "5.0:8.0:0.5"}}},
      {"fig7_period2", {{"N_range", "10..13"}}},
      {"fig8_chaos", {{"N_range", "0..10"}, {"state_scales", "6,8,10"}}},
      {"fig9_pdfs", {{"N_range", "6..8"}, {"samples", "500"}, {"bins", "32"}}},
      {"fig10_stochastic_eigenmode",
       {{"N_range", "6..9"}, {"samples", "1000"}, {"bins", "32"}}},
      {"fig11_moments", {{"p_grid", "10.3:10.7:0.2"}, {"N", "7"}, {"samples", "500"}}},
      {"fig12_stochastic_period2",
       {{"N_range", "6..9"}, {"samples", "500"}, {"bins", "32"}}},
      {"app_structure_functions",
       {{"N", "8"}, {"transient", "10"}, {"window", "50"}, {"inertial", "2..5"}}}};

  const fs::path base = fs::temp_directory_path() / "rglat_acceptance_c12";
  fs::remove_all(base);
  bool all_ok = true;
  std::string first_bad;
  for (const auto& [name, overrides] : reduced) {
    std::map<std::string, std::string> hashes[2];
    for (int pass = 0; pass < 2; ++pass) {
      RunRequest req;
      req.name = name;
      req.file_config = overrides;
      req.seed_override = g_seed;
      req.threads_override = pass == 0 ? 1 : 2;
      req.outdir = base / (name + (pass == 0 ? "_t1" : "_t2"));
      run_experiment(req);
      hashes[pass] = csv_hashes(req.outdir);
    }
    if (hashes[0] != hashes[1] || hashes[0].empty()) {
      all_ok = false;
      if (first_bad.empty()) first_bad = name;
    }
  }
  report(12, "byte-identical reruns", all_ok,
         all_ok ? fmt("all %zu registry entries, threads 1 vs 2", reduced.size())
                : "mismatch in " + first_bad,
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--threads") == 0 && i + 1 < argc) {
      g_threads = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) {
      g_seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      std::istringstream in(argv[++i]);
      std::string tok;
      while (std::getline(in, tok, ',')) only.insert(std::atoi(tok.c_str()));
    }
  }
#ifdef _OPENMP
  if (g_threads > 0) omp_set_num_threads(g_threads);
#endif

  using Fn = void (*)();
  const std::pair<int, Fn> criteria[] = {
      {1, criterion1}, {2, criterion2},  {3, criterion3},  {4, criterion4},
      {5, criterion5}, {6, criterion6},  {7, criterion7},  {8, criterion8},
      {9, criterion9}, {10, criterion10}, {11, criterion11}, {12, criterion12}};
  for (const auto& [id, fn] : criteria) {
    if (!only.empty() && !only.count(id)) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, "exception", false, e.what(), 0.0);
    }
  }
  std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              g_failures);
  return g_failures == 0 ? 0 : 1;
}
