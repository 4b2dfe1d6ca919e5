#include "rglat/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "rglat/cascade.hpp"
#include "rglat/flow_algebra.hpp"
#include "rglat/lattice.hpp"
#include "rglat/spectral.hpp"
#include "rglat/stochastic.hpp"

namespace rglat {

namespace {

// Resolved configuration with typed accessors. Every key is guaranteed to
// exist because resolution starts from the preset defaults.
struct Resolved {
  KvMap kv;
  std::uint64_t seed = 0;
  int threads = 0;

  const std::string& s(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::logic_error("missing config key: " + key);
    return it->second;
  }
  double d(const std::string& key) const { return parse_double(s(key)); }
  int i(const std::string& key) const { return parse_int(s(key)); }
  bool b(const std::string& key) const { return parse_bool(s(key)); }
  std::pair<int, int> range(const std::string& key) const {
    return parse_int_range(s(key));
  }
  std::vector<double> grid(const std::string& key) const { return parse_grid(s(key)); }
  std::vector<int> ilist(const std::string& key) const { return parse_int_list(s(key)); }
  std::vector<double> dlist(const std::string& key) const {
    return parse_double_list(s(key));
  }
  TransferSpec transfer() const {
    return TransferSpec{family_from_name(s("family")), d("p")};
  }
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return mix64(base ^ mix64(tag));
}

Dissipation parse_noise(const std::string& s) {
  if (s == "mu") return kNoiseMu;
  if (s == "mutilde") return kNoiseMuTilde;
  const auto vals = parse_double_list(s);
  if (vals.size() != 2) throw std::invalid_argument("bad noise spec: " + s);
  return Dissipation::uniform(vals[0], vals[1]);
}

std::string noise_label(const Dissipation& d) {
  if (d.lo == kNoiseMu.lo && d.hi == kNoiseMu.hi) return "mu";
  if (d.lo == kNoiseMuTilde.lo && d.hi == kNoiseMuTilde.hi) return "mutilde";
  return format_g17(d.lo) + "_" + format_g17(d.hi);
}

std::string state_csv(std::span<const double> values) {
  Csv csv("n,u");
  for (std::size_t n = 0; n < values.size(); ++n)
    csv.cell(static_cast<std::int64_t>(n)).cell(values[n]).end_row();
  return csv.str();
}

std::string pdf_csv(const BinGrid& grid, std::span<const double> density) {
  Csv csv("bin_left,bin_right,density");
  for (std::size_t b = 0; b < density.size(); ++b) {
    csv.cell(grid.lo + b * grid.width())
        .cell(grid.lo + (b + 1) * grid.width())
        .cell(density[b])
        .end_row();
  }
  return csv.str();
}

nlohmann::json ledger_json(const EnergyLedger& ledger, double initial_total) {
  return {{"dissipated", ledger.dissipated.value()},
          {"injected", ledger.injected.value()},
          {"truncated", ledger.truncated.value()},
          {"initial_total", initial_total}};
}

nlohmann::json initial_json(const std::string& init) {
  nlohmann::json j;
  j["spec"] = init;
  if (init.rfind("powerlaw:", 0) == 0)
    j["decay_exponent"] = parse_double(init.substr(9));
  return j;
}

nlohmann::json sample_set_json(const SampleSet& set) {
  return {{"seed", set.seed},
          {"N", set.viscous_scale},
          {"noise_lo", set.noise.lo},
          {"noise_hi", set.noise.hi},
          {"family", family_name(set.transfer.family)},
          {"p", set.transfer.p},
          {"M", set.size()},
          {"initial", set.initial_id}};
}

// ---------------------------------------------------------------------------
// thm1_verify

void run_thm1(const Resolved& rd, RunEmitter& em) {
  const int n_max = rd.i("n_max");
  const int states = rd.i("states");
  const auto alphas = rd.dlist("alphas");
  const int n_cap = n_max + 4;
  const double fa_p = rd.d("fa_p");
  const double fb_p = rd.d("fb_p");

  Csv csv("family,alpha,N,state_id,max_dev");
  double worst = 0.0;
  std::uint64_t stream = 0;
  for (TransferFamily fam : {TransferFamily::FA, TransferFamily::FB}) {
    const TransferSpec spec{fam, fam == TransferFamily::FA ? fa_p : fb_p};
    for (double alpha : alphas) {
      const Dissipation diss = Dissipation::deterministic(alpha);
      for (int N = 0; N <= n_max; ++N) {
        for (int sid = 0; sid < states; ++sid) {
          RngStream rng(rd.seed, stream++);
          std::vector<double> a(static_cast<std::size_t>(n_cap) + 1, 0.0);
          for (int n = 0; n <= N + 1; ++n) a[n] = rng.uniform01();
          const FlowMap base(N, diss, spec, n_cap);
          const FlowMap target(N + 1, diss, spec, n_cap);
          const std::vector<double> via_rg = rg_apply(base, a);
          const std::vector<double> direct = target(a);
          double dev = 0.0;
          for (std::size_t j = 0; j < direct.size(); ++j)
            dev = std::max(dev, std::abs(via_rg[j] - direct[j]));
          worst = std::max(worst, dev);
          csv.cell(family_name(fam))
              .cell(alpha)
              .cell(static_cast<std::int64_t>(N))
              .cell(static_cast<std::int64_t>(sid))
              .cell(dev)
              .end_row();
        }
      }
    }
  }
  em.add_file("deviations.csv", csv.str());
  em.metadata()["report"] = {{"max_deviation", worst},
                             {"tolerance", 1e-12},
                             {"pass", worst <= 1e-12}};
}

// ---------------------------------------------------------------------------
// thm2_verify

void run_thm2(const Resolved& rd, RunEmitter& em) {
  const int n_max = rd.i("n_max");
  const int m_max = rd.i("m_max");
  const int k_max = rd.i("k_max");
  const int states = rd.i("states");
  const double alpha = rd.d("alpha");
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_max + 4;

  Csv csv("N,m,indices,state_id,max_dev");
  double worst = 0.0;
  std::uint64_t cases = 0;

  for (int N = 1; N <= n_max; ++N) {
    // All strictly increasing index tuples 0 < i1 < ... < ik <= N, k <= k_max,
    // plus the empty tuple (integer times).
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
    extend(extend, 1, k_max);

    const SimConfig cfg{spec, {N, Dissipation::deterministic(alpha)}, false, n_cap};
    for (int sid = 0; sid < states; ++sid) {
      std::vector<double> a(static_cast<std::size_t>(n_cap) + 1, 0.0);
      if (sid == 0) {
        const auto stair = make_initial_condition("staircase", n_cap);
        std::copy(stair.begin(), stair.end(), a.begin());
      } else {
        RngStream rng(rd.seed, static_cast<std::uint64_t>(N) * 1000 + sid);
        for (int n = 0; n <= N; ++n) a[n] = rng.uniform01();
      }
      for (const auto& indices : tuples) {
        for (int m = 0; m <= m_max; ++m) {
          if (m == 0 && indices.empty()) continue;
          DyadicTime t{m, indices};
          const std::vector<double> composed =
              state_at_dyadic_time(a, N, alpha, spec, t, n_cap);

          LatticeState s = detail::make_state(a, n_cap);
          EnergyLedger ledger;
          run_ticks(s, cfg, nullptr, ledger, t.fine_ticks(N),
                    [](int, double, std::uint64_t) {});
          const int base = indices.empty() ? 0 : indices.back();
          double dev = 0.0;
          for (std::size_t r = 0; base + static_cast<int>(r) <= n_cap; ++r)
            dev = std::max(dev, std::abs(composed[r] - s.values[base + r]));
          worst = std::max(worst, dev);
          ++cases;

          std::string idx_label;
          for (int i : indices) {
            if (!idx_label.empty()) idx_label += '+';
            idx_label += std::to_string(i);
          }
          if (idx_label.empty()) idx_label = "-";
          csv.cell(static_cast<std::int64_t>(N))
              .cell(static_cast<std::int64_t>(m))
              .cell(idx_label)
              .cell(static_cast<std::int64_t>(sid))
              .cell(dev)
              .end_row();
        }
      }
    }
  }
  em.add_file("deviations.csv", csv.str());
  em.metadata()["report"] = {{"max_deviation", worst},
                             {"cases", cases},
                             {"tolerance", 1e-12},
                             {"pass", worst <= 1e-12}};
}

// ---------------------------------------------------------------------------
// fig5_collapse

void run_fig5_collapse(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const auto alphas = rd.dlist("alphas");
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_hi + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  std::vector<std::pair<std::string, std::vector<double>>> states;
  for (double alpha : alphas) {
    for (int N = n_lo; N <= n_hi; ++N) {
      const FlowMap phi(N, Dissipation::deterministic(alpha), spec, n_cap);
      std::vector<double> u = phi(a);
      const std::string name =
          "state_N" + std::to_string(N) + "_a" + format_g17(alpha) + ".csv";
      em.add_file(name, state_csv(u));
      states.emplace_back("N" + std::to_string(N) + ",a" + format_g17(alpha),
                          std::move(u));
    }
  }

  double max_pair_dev = 0.0;
  nlohmann::json pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      double dev = 0.0;
      for (std::size_t n = 0; n < states[i].second.size(); ++n)
        dev = std::max(dev, std::abs(states[i].second[n] - states[j].second[n]));
      max_pair_dev = std::max(max_pair_dev, dev);
      pairs.push_back({{"a", states[i].first}, {"b", states[j].first}, {"max_dev", dev}});
    }
  }

  // Within each alpha, consecutive differences shrink geometrically with
  // ratio ~ |rho|.
  nlohmann::json ratios = nlohmann::json::array();
  for (double alpha : alphas) {
    std::vector<double> norms;
    for (int N = n_lo; N < n_hi; ++N) {
      const FlowMap lo_map(N, Dissipation::deterministic(alpha), spec, n_cap);
      const FlowMap hi_map(N + 1, Dissipation::deterministic(alpha), spec, n_cap);
      const auto u_lo = lo_map(a);
      const auto u_hi = hi_map(a);
      double dev = 0.0;
      for (std::size_t n = 0; n < u_lo.size(); ++n)
        dev = std::max(dev, std::abs(u_hi[n] - u_lo[n]));
      norms.push_back(dev);
    }
    for (std::size_t i = 0; i + 1 < norms.size(); ++i)
      ratios.push_back({{"alpha", alpha}, {"ratio", norms[i + 1] / norms[i]}});
  }

  em.metadata()["report"] = {{"max_pairwise_deviation", max_pair_dev},
                             {"pairwise", pairs},
                             {"difference_ratios", ratios}};
}

// ---------------------------------------------------------------------------
// fig5_eigenvector

void run_fig5_eigenvector(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const auto alphas = rd.dlist("alphas");
  const int rho_n_max = rd.i("rho_N_max");
  const int probe = rd.i("probe");
  const int fit_components = rd.i("fit_components");
  const TransferSpec spec = rd.transfer();
  const int n_cap = rho_n_max + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  // Eigenvalue from the reference regularization (first alpha).
  const double alpha_ref = alphas.at(0);
  std::vector<std::vector<double>> ref_chain;
  for (int N = n_lo; N <= rho_n_max; ++N)
    ref_chain.push_back(cauchy_difference(N, alpha_ref, spec, a, n_cap));
  const RhoEstimate rho_est = estimate_rho(ref_chain, probe);
  const double rho = rho_est.rho;

  // Reference eigenvector, normalized by c(alpha_ref) = 1 at the largest N.
  const std::vector<double> psi_ref =
      estimate_eigenvector(ref_chain.back(), rho, 1.0, rho_n_max);

  Csv diff_csv("N,alpha,n,delta_u");
  Csv psi_csv("N,alpha,n,psi");
  nlohmann::json c_fits = nlohmann::json::array();
  std::map<std::string, std::vector<double>> c_by_alpha;
  std::vector<std::pair<double, std::vector<double>>> rescaled;

  for (double alpha : alphas) {
    for (int N = n_lo; N <= n_hi; ++N) {
      const std::vector<double> delta = cauchy_difference(N, alpha, spec, a, n_cap);
      for (int n = 0; n <= std::min(n_cap, 16); ++n)
        diff_csv.cell(static_cast<std::int64_t>(N))
            .cell(alpha)
            .cell(static_cast<std::int64_t>(n))
            .cell(delta[n])
            .end_row();
      const double c = fit_scale_coefficient(delta, psi_ref, rho, N, fit_components);
      c_by_alpha[format_g17(alpha)].push_back(c);
      c_fits.push_back({{"alpha", alpha}, {"N", N}, {"c", c}});
      rescaled.emplace_back(alpha, delta);
    }
  }

  nlohmann::json c_means;
  std::map<std::string, double> c_mean_map;
  for (const auto& [alpha_label, cs] : c_by_alpha) {
    double mean = 0.0;
    for (double c : cs) mean += c;
    mean /= static_cast<double>(cs.size());
    c_means[alpha_label] = mean;
    c_mean_map[alpha_label] = mean;
  }

  // Rescale every difference by its own c(alpha); the curves must collapse.
  std::vector<std::vector<double>> psis;
  {
    std::size_t idx = 0;
    for (double alpha : alphas) {
      const double c = c_mean_map[format_g17(alpha)];
      for (int N = n_lo; N <= n_hi; ++N, ++idx) {
        const std::vector<double> psi =
            estimate_eigenvector(rescaled[idx].second, rho, c, N);
        for (int n = 0; n <= std::min(n_cap, 16); ++n)
          psi_csv.cell(static_cast<std::int64_t>(N))
              .cell(alpha)
              .cell(static_cast<std::int64_t>(n))
              .cell(psi[n])
              .end_row();
        psis.push_back(psi);
      }
    }
  }
  double psi_scale = 0.0;
  for (int n = 0; n <= fit_components; ++n)
    psi_scale = std::max(psi_scale, std::abs(psi_ref[n]));
  double spread = 0.0;
  for (std::size_t i = 0; i < psis.size(); ++i)
    for (std::size_t j = i + 1; j < psis.size(); ++j)
      for (int n = 0; n <= fit_components; ++n)
        spread = std::max(spread, std::abs(psis[i][n] - psis[j][n]));
  const double rel_spread = spread / psi_scale;

  const double c_ref = c_mean_map[format_g17(alphas.at(0))];
  nlohmann::json c_ratios;
  for (const auto& [alpha_label, mean] : c_mean_map)
    c_ratios[alpha_label] = mean / c_ref;

  em.add_file("differences.csv", diff_csv.str());
  em.add_file("eigenvectors.csv", psi_csv.str());
  em.metadata()["report"] = {{"rho", rho},
                             {"rho_dispersion", rho_est.dispersion},
                             {"probe", probe},
                             {"c_fits", c_fits},
                             {"c_mean", c_means},
                             {"c_ratio_vs_ref", c_ratios},
                             {"collapse_rel_spread", rel_spread},
                             {"fit_components", fit_components}};
}

// ---------------------------------------------------------------------------
// fig6_bifurcation

void run_fig6(const Resolved& rd, RunEmitter& em) {
  const auto p_grid = rd.grid("p_grid");
  const int N = rd.i("N");
  const double alpha = rd.d("alpha");
  const int probe = rd.i("probe");
  const TransferFamily family = family_from_name(rd.s("family"));
  const int n_cap = N + 5;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  const BifurcationScan scan =
      bifurcation_scan(p_grid, family, alpha, a, N, probe, n_cap, rd.threads);

  Csv rho_csv("p,rho");
  for (std::size_t i = 0; i < scan.p.size(); ++i)
    rho_csv.cell(scan.p[i]).cell(scan.rho[i]).end_row();
  Csv bif_csv("p,u4_N,u4_N1,delta_sq");
  for (std::size_t i = 0; i < scan.p.size(); ++i)
    bif_csv.cell(scan.p[i])
        .cell(scan.u_probe_N[i])
        .cell(scan.u_probe_N1[i])
        .cell(scan.delta_sq[i])
        .end_row();
  em.add_file("rho_curve.csv", rho_csv.str());
  em.add_file("bifurcation.csv", bif_csv.str());
  em.metadata()["report"] = {{"p_pd_rho_crossing", scan.p_pd_crossing},
                             {"p_pd_delta_sq_onset", scan.p_pd_onset},
                             {"post_window", {scan.post_window_lo, scan.post_window_hi}},
                             {"post_fit_r2", scan.post_fit_r2},
                             {"probe", probe},
                             {"N", N}};
  em.metadata()["tolerances"] = {{"crossing_interpolation", "linear on bracketing grid points"}};
}

// ---------------------------------------------------------------------------
// fig7_period2

void run_fig7(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const double alpha = rd.d("alpha");
  const int probe = rd.i("probe");
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_hi + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  std::map<int, std::vector<double>> states;
  for (int N = n_lo; N <= n_hi; ++N) {
    const FlowMap phi(N, Dissipation::deterministic(alpha), spec, n_cap);
    states[N] = phi(a);
    em.add_file("state_N" + std::to_string(N) + ".csv", state_csv(states[N]));
  }

  // Cross-parity gap at the probe component vs within-parity convergence.
  const double gap = std::abs(states[n_hi][probe] - states[n_hi - 1][probe]);
  const double within_hi = std::abs(states[n_hi][probe] - states[n_hi - 2][probe]);
  const double within_lo =
      std::abs(states[n_hi - 1][probe] - states[n_hi - 3][probe]);
  const double within = std::max(within_hi, within_lo);
  em.metadata()["report"] = {
      {"probe", probe},
      {"cross_parity_gap", gap},
      {"within_parity_max", within},
      {"gap_ratio", within > 0.0 ? gap / within : std::numeric_limits<double>::infinity()}};
}

// ---------------------------------------------------------------------------
// fig8_chaos

void run_fig8(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const double alpha = rd.d("alpha");
  const double delta_alpha = rd.d("delta_alpha");
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_hi + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  for (int N : rd.ilist("state_scales")) {
    const FlowMap phi(N, Dissipation::deterministic(alpha), spec, n_cap);
    em.add_file("state_N" + std::to_string(N) + ".csv", state_csv(phi(a)));
  }

  std::vector<int> scales;
  for (int N = n_lo; N <= n_hi; ++N) scales.push_back(N);
  const GrowthCurve curve =
      perturbation_growth(alpha, delta_alpha, spec, a, scales, n_cap, rd.threads);

  Csv growth_csv("N,norm_delta_u");
  for (std::size_t i = 0; i < curve.scales.size(); ++i)
    growth_csv.cell(static_cast<std::int64_t>(curve.scales[i]))
        .cell(curve.norms[i])
        .end_row();
  em.add_file("growth.csv", growth_csv.str());

  nlohmann::json fit_json;
  try {
    const GrowthFit gf = fit_growth_curve(curve);
    fit_json = {{"slope", gf.fit.slope},
                {"intercept", gf.fit.intercept},
                {"r2", gf.fit.r2},
                {"window", gf.window}};
  } catch (const std::exception& e) {
    fit_json = {{"error", e.what()}};
  }
  em.metadata()["report"] = {{"delta_alpha", delta_alpha}, {"loglog_fit", fit_json}};
}

// ---------------------------------------------------------------------------
// fig9_pdfs

void run_fig9(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const std::size_t samples = static_cast<std::size_t>(rd.i("samples"));
  const auto components = rd.ilist("components");
  const int bins = rd.i("bins");
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_hi + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  std::vector<int> stored = components;
  for (int c : {0, 1})
    if (std::find(stored.begin(), stored.end(), c) == stored.end())
      stored.insert(stored.begin(), c);
  std::sort(stored.begin(), stored.end());

  std::vector<SampleSet> sets;
  std::vector<std::string> labels;
  std::istringstream noises(rd.s("noises"));
  std::string noise_name;
  while (std::getline(noises, noise_name, ';')) {
    const Dissipation noise = parse_noise(noise_name);
    for (int N = n_lo; N <= n_hi; ++N) {
      const std::uint64_t set_seed =
          derive_seed(rd.seed, static_cast<std::uint64_t>(N) * 2 +
                                   (noise_label(noise) == "mu" ? 0 : 1));
      sets.push_back(sample_kernel(a, N, noise, spec, samples, set_seed, stored,
                                   n_cap, rd.threads, rd.s("init")));
      labels.push_back("N" + std::to_string(N) + "_" + noise_label(noise));
    }
  }

  nlohmann::json report;
  double max_ks = 0.0;
  for (int comp : components) {
    std::vector<const SampleSet*> ptrs;
    for (const auto& s : sets) ptrs.push_back(&s);
    const BinGrid grid = pooled_grid(ptrs, comp, bins);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      const HistogramPDF pdf = marginal_pdf(sets[i], comp, grid);
      em.add_file("pdf_u" + std::to_string(comp) + "_" + labels[i] + ".csv",
                  pdf_csv(pdf.grid, pdf.density));
    }
    double comp_max = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i)
      for (std::size_t j = i + 1; j < sets.size(); ++j)
        comp_max = std::max(
            comp_max, ks_distance(sets[i].column(comp), sets[j].column(comp)));
    report["max_ks_u" + std::to_string(comp)] = comp_max;
    max_ks = std::max(max_ks, comp_max);
  }
  report["max_ks"] = max_ks;
  nlohmann::json provenance = nlohmann::json::object();
  for (std::size_t i = 0; i < sets.size(); ++i)
    provenance[labels[i]] = sample_set_json(sets[i]);
  report["sample_sets"] = provenance;

  // The two largest-scale components are deterministic.
  double det_var = 0.0;
  for (const auto& s : sets) {
    for (int c : {0, 1}) {
      const Moments m = kernel_moments(s.column(c));
      det_var = std::max(det_var, m.stddev * m.stddev);
    }
  }
  report["max_variance_u0_u1"] = det_var;

  if (rd.b("emit_samples")) {
    for (std::size_t i = 0; i < sets.size(); ++i) {
      std::string header = "sample_id";
      for (int c : stored) header += ",u" + std::to_string(c);
      Csv csv(header);
      for (std::size_t row = 0; row < sets[i].size(); ++row) {
        csv.cell(static_cast<std::int64_t>(row));
        for (std::size_t c = 0; c < stored.size(); ++c)
          csv.cell(sets[i].columns[c][row]);
        csv.end_row();
      }
      em.add_file("samples_" + labels[i] + ".csv", csv.str());
    }
  }
  em.metadata()["report"] = report;
}

// ---------------------------------------------------------------------------
// fig10_stochastic_eigenmode

void run_fig10(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const std::size_t samples = static_cast<std::size_t>(rd.i("samples"));
  const auto components = rd.ilist("components");
  const int bins = rd.i("bins");
  const Dissipation noise = parse_noise(rd.s("noise"));
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_hi + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  std::vector<SampleSet> sets;
  for (int N = n_lo; N <= n_hi; ++N) {
    const std::uint64_t set_seed = derive_seed(rd.seed, static_cast<std::uint64_t>(N));
    sets.push_back(sample_kernel(a, N, noise, spec, samples, set_seed, components,
                                 n_cap, rd.threads, rd.s("init")));
  }

  std::vector<DeltaSeries> series;
  nlohmann::json per_component;
  for (int comp : components) {
    std::vector<const SampleSet*> ptrs;
    for (const auto& s : sets) ptrs.push_back(&s);
    const BinGrid grid = pooled_grid(ptrs, comp, bins);
    std::vector<HistogramPDF> pdfs;
    for (const auto& s : sets) pdfs.push_back(marginal_pdf(s, comp, grid));
    DeltaSeries ds;
    ds.first_scale = n_lo;
    for (std::size_t i = 0; i + 1 < pdfs.size(); ++i) {
      SignedHistogram d = delta_pdf(pdfs[i + 1], pdfs[i]);
      em.add_file("delta_pdf_u" + std::to_string(comp) + "_N" +
                      std::to_string(n_lo + static_cast<int>(i)) + ".csv",
                  pdf_csv(d.grid, d.density));
      ds.deltas.push_back(std::move(d));
    }
    const StochasticRhoEstimate single = estimate_rho_stochastic({{ds}});
    per_component["u" + std::to_string(comp)] = {{"rho", single.rho},
                                                 {"boundary", single.boundary}};
    em.add_file("eigenmode_u" + std::to_string(comp) + ".csv",
                pdf_csv(grid, single.eigenmodes.front()));
    // Rescaled curves per N for the collapse figure.
    for (std::size_t i = 0; i < ds.deltas.size(); ++i) {
      std::vector<double> rescaled = ds.deltas[i].density;
      const double r = ipow(single.rho, n_lo + static_cast<int>(i));
      for (double& v : rescaled) v /= r;
      em.add_file("rescaled_u" + std::to_string(comp) + "_N" +
                      std::to_string(n_lo + static_cast<int>(i)) + ".csv",
                  pdf_csv(grid, rescaled));
    }
    series.push_back(std::move(ds));
  }

  const StochasticRhoEstimate combined = estimate_rho_stochastic(series);
  nlohmann::json provenance = nlohmann::json::object();
  for (const SampleSet& s : sets)
    provenance["N" + std::to_string(s.viscous_scale)] = sample_set_json(s);
  em.metadata()["report"] = {{"rho", combined.rho},
                             {"boundary", combined.boundary},
                             {"objective", combined.objective},
                             {"per_component", per_component},
                             {"sample_sets", provenance}};
  em.metadata()["tolerances"] = {{"rho_search_domain", {-0.999, -0.05}},
                                 {"golden_section", 1e-3}};
}

// ---------------------------------------------------------------------------
// fig11_moments

void run_fig11(const Resolved& rd, RunEmitter& em) {
  const auto p_grid = rd.grid("p_grid");
  const int N = rd.i("N");
  const std::size_t samples = static_cast<std::size_t>(rd.i("samples"));
  const int component = rd.i("component");
  const Dissipation noise = parse_noise(rd.s("noise"));
  const TransferFamily family = family_from_name(rd.s("family"));
  const int n_cap = N + 5;
  const auto a = make_initial_condition(rd.s("init"), n_cap);
  const std::vector<int> stored{component};

  Csv csv("p,N,component,mean,std,se_mean,se_std");
  double split_onset = std::numeric_limits<double>::quiet_NaN();
  for (double p : p_grid) {
    const TransferSpec spec{family, p};
    Moments m[2];
    for (int dn = 0; dn < 2; ++dn) {
      const std::uint64_t set_seed = derive_seed(
          rd.seed, static_cast<std::uint64_t>((N + dn) * 4096) +
                       static_cast<std::uint64_t>(p * 1000.0));
      const SampleSet set = sample_kernel(a, N + dn, noise, spec, samples, set_seed,
                                          stored, n_cap, rd.threads, rd.s("init"));
      m[dn] = kernel_moments(set.column(component));
      csv.cell(p)
          .cell(static_cast<std::int64_t>(N + dn))
          .cell(static_cast<std::int64_t>(component))
          .cell(m[dn].mean)
          .cell(m[dn].stddev)
          .cell(m[dn].se_mean)
          .cell(m[dn].se_std)
          .end_row();
    }
    const double se = std::hypot(m[0].se_mean, m[1].se_mean);
    if (std::isnan(split_onset) && std::abs(m[0].mean - m[1].mean) > 6.0 * se)
      split_onset = p;
  }
  em.add_file("moments.csv", csv.str());
  em.metadata()["report"] = {{"component", component},
                             {"mean_split_onset_p", split_onset}};
}

// ---------------------------------------------------------------------------
// fig12_stochastic_period2

void run_fig12(const Resolved& rd, RunEmitter& em) {
  const auto [n_lo, n_hi] = rd.range("N_range");
  const std::size_t samples = static_cast<std::size_t>(rd.i("samples"));
  const auto components = rd.ilist("components");
  const int bins = rd.i("bins");
  const TransferSpec spec = rd.transfer();
  const int n_cap = n_hi + 4;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  std::vector<std::string> noise_names;
  {
    std::istringstream in(rd.s("noises"));
    std::string item;
    while (std::getline(in, item, ';')) noise_names.push_back(item);
  }
  if (noise_names.size() != 2)
    throw std::invalid_argument("fig12 requires exactly two noises");

  std::vector<std::vector<SampleSet>> sets(2);
  for (int which = 0; which < 2; ++which) {
    const Dissipation noise = parse_noise(noise_names[which]);
    for (int N = n_lo; N <= n_hi; ++N) {
      const std::uint64_t set_seed = derive_seed(
          rd.seed, static_cast<std::uint64_t>(N) * 2 + static_cast<std::uint64_t>(which));
      sets[which].push_back(sample_kernel(a, N, noise, spec, samples, set_seed,
                                          components, n_cap, rd.threads, rd.s("init")));
    }
  }

  for (int which = 0; which < 2; ++which) {
    for (int comp : components) {
      std::vector<const SampleSet*> ptrs;
      for (const auto& s : sets[which]) ptrs.push_back(&s);
      const BinGrid grid = pooled_grid(ptrs, comp, bins);
      for (std::size_t i = 0; i < sets[which].size(); ++i) {
        const HistogramPDF pdf = marginal_pdf(sets[which][i], comp, grid);
        em.add_file("pdf_u" + std::to_string(comp) + "_N" +
                        std::to_string(n_lo + static_cast<int>(i)) + "_" +
                        noise_label(parse_noise(noise_names[which])) + ".csv",
                    pdf_csv(pdf.grid, pdf.density));
      }
    }
  }

  const Period2Report rep =
      detect_kernel_period2(sets[0], sets[1], components);

  nlohmann::json matrices;
  for (std::size_t c = 0; c < rep.components.size(); ++c) {
    nlohmann::json m = nlohmann::json::array();
    const std::size_t n = rep.scales.size();
    for (std::size_t i = 0; i < n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t j = 0; j < n; ++j) row.push_back(rep.distances[c][i * n + j]);
      m.push_back(row);
    }
    matrices["u" + std::to_string(rep.components[c])] = m;
  }

  nlohmann::json cls = {{"classification", kernel_class_name(rep.classification)},
                        {"scales", rep.scales},
                        {"components", rep.components},
                        {"samples_per_set", samples},
                        {"ks_critical_1pct", rep.critical},
                        {"max_within_parity", rep.max_within_parity},
                        {"min_cross_parity", rep.min_cross_parity},
                        {"swap_checked", rep.swap_checked},
                        {"swap_verified", rep.swap_verified},
                        {"ks_matrices", matrices}};
  em.add_file("classification.json", cls.dump(2) + "\n");
  nlohmann::json provenance = nlohmann::json::object();
  for (int which = 0; which < 2; ++which)
    for (const SampleSet& s : sets[which])
      provenance[noise_label(parse_noise(noise_names[which])) + "_N" +
                 std::to_string(s.viscous_scale)] = sample_set_json(s);
  em.metadata()["report"] = cls;
  em.metadata()["report"]["sample_sets"] = provenance;
}

// ---------------------------------------------------------------------------
// app_structure_functions

void run_structure_functions(const Resolved& rd, RunEmitter& em) {
  const int N = rd.i("N");
  const int transient = rd.i("transient");
  const int window = rd.i("window");
  const int p_max = rd.i("p_max");
  const auto [in_lo, in_hi] = rd.range("inertial");
  const TransferSpec spec = rd.transfer();
  const int n_cap = N + 2;
  const auto a = make_initial_condition(rd.s("init"), n_cap);

  const SimConfig cfg{spec, {N, Dissipation::deterministic(rd.d("alpha"))}, true, n_cap};
  const ForcedRunResult run = forced_steady_run(cfg, a, transient, window, p_max);

  Csv sf_csv("n,p,S_p");
  for (int n = 0; n <= N; ++n)
    for (int p = 1; p <= p_max; ++p)
      sf_csv.cell(static_cast<std::int64_t>(n))
          .cell(static_cast<std::int64_t>(p))
          .cell(run.table.values[n][p - 1])
          .end_row();
  em.add_file("structure_functions.csv", sf_csv.str());

  const ZetaFit fit = fit_zeta(run.table, in_lo, in_hi);
  Csv zeta_csv("p,zeta,stderr");
  for (int p = 1; p <= p_max; ++p)
    zeta_csv.cell(static_cast<std::int64_t>(p))
        .cell(fit.zeta[p - 1])
        .cell(fit.stderr_[p - 1])
        .end_row();
  em.add_file("zeta.csv", zeta_csv.str());

  const FluxReport flux = flux_balance_check(run, in_lo, in_hi);
  nlohmann::json flux_json = {{"injection_rate", flux.injection_rate},
                              {"dissipation_rate", flux.dissipation_rate},
                              {"balance_ratio", flux.balance_ratio},
                              {"scales", flux.scales},
                              {"mean_energy", flux.mean_energy},
                              {"flux_proxy", flux.flux_proxy},
                              {"proxy_loglog_slope", flux.proxy_loglog_slope}};
  em.add_file("flux_report.json", flux_json.dump(2) + "\n");

  em.metadata()["report"] = {{"zeta1", fit.zeta[0]},
                             {"zeta1_stderr", fit.stderr_[0]},
                             {"zeta", fit.zeta},
                             {"inertial_range", {in_lo, in_hi}},
                             {"flux", flux_json}};
  em.metadata()["ledger"] = ledger_json(run.ledger, run.initial_total);
}

// ---------------------------------------------------------------------------

using RunFn = void (*)(const Resolved&, RunEmitter&);

struct Entry {
  ExperimentInfo info;
  RunFn run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    const std::string stair = "staircase";

    t.push_back({{"thm1_verify",
                  "flow_algebra",
                  "Renormalization identity: composed map vs direct simulation",
                  "~1 s",
                  "~1 s",
                  {{"n_max", "10"}, {"states", "100"}, {"alphas", "0.25,0.75"},
                   {"fa_p", "5.0"}, {"fb_p", "10.3"}, {"seed", "12345"}},
                  {{"n_max", "10"}, {"states", "100"}, {"alphas", "0.25,0.75"},
                   {"fa_p", "5.0"}, {"fb_p", "10.3"}, {"seed", "12345"}}},
                 run_thm1});

    t.push_back({{"thm2_verify",
                  "flow_algebra",
                  "Dyadic-time composition vs direct simulation",
                  "~2 s",
                  "~2 s",
                  {{"n_max", "8"}, {"m_max", "2"}, {"k_max", "3"}, {"states", "3"},
                   {"family", "FA"}, {"p", "5.0"}, {"alpha", "0.25"}, {"seed", "12345"}},
                  {{"n_max", "8"}, {"m_max", "2"}, {"k_max", "3"}, {"states", "3"},
                   {"family", "FA"}, {"p", "5.0"}, {"alpha", "0.25"}, {"seed", "12345"}}},
                 run_thm2});

    t.push_back({{"fig5_collapse",
                  "rg_spectral",
                  "Convergence of u(1) across viscous scales and dissipation rates",
                  "~0.1 s",
                  "~0.1 s",
                  {{"family", "FA"}, {"p", "5.0"}, {"N_range", "12..15"},
                   {"alphas", "0.25,0.75"}, {"init", stair}, {"seed", "12345"}},
                  {{"family", "FA"}, {"p", "5.0"}, {"N_range", "12..15"},
                   {"alphas", "0.25,0.75"}, {"init", stair}, {"seed", "12345"}}},
                 run_fig5_collapse});

    t.push_back({{"fig5_eigenvector",
                  "rg_spectral",
                  "Leading eigenvalue and eigenvector collapse of rescaled differences",
                  "~0.1 s",
                  "~0.5 s",
                  {{"family", "FA"}, {"p", "5.0"}, {"N_range", "12..15"},
                   {"alphas", "0.25,0.75"}, {"rho_N_max", "18"}, {"probe", "4"},
                   {"fit_components", "8"}, {"init", stair}, {"seed", "12345"}},
                  {{"family", "FA"}, {"p", "5.0"}, {"N_range", "12..15"},
                   {"alphas", "0.25,0.75"}, {"rho_N_max", "20"}, {"probe", "4"},
                   {"fit_components", "8"}, {"init", stair}, {"seed", "12345"}}},
                 run_fig5_eigenvector});

    t.push_back({{"fig6_bifurcation",
                  "rg_spectral",
                  "Eigenvalue and probe-component scan over the family parameter",
                  "~5 s",
                  "~5 min",
                  {{"family", "FA"}, {"N", "20"}, {"alpha", "0.25"},
                   {"p_grid", "5.0:8.0:0.05"}, {"probe", "4"}, {"init", stair},
                   {"seed", "12345"}},
                  {{"family", "FA"}, {"N", "25"}, {"alpha", "0.25"},
                   {"p_grid", "5.0:8.0:0.05"}, {"probe", "4"}, {"init", stair},
                   {"seed", "12345"}}},
                 run_fig6});

    t.push_back({{"fig7_period2",
                  "rg_spectral",
                  "Distinct even/odd limits past the period doubling",
                  "~0.2 s",
                  "~10 s",
                  {{"family", "FA"}, {"p", "8.0"}, {"N_range", "14..21"},
                   {"alpha", "0.25"}, {"probe", "4"}, {"init", stair},
                   {"seed", "12345"}},
                  {{"family", "FA"}, {"p", "8.0"}, {"N_range", "19..26"},
                   {"alpha", "0.25"}, {"probe", "4"}, {"init", stair},
                   {"seed", "12345"}}},
                 run_fig7});

    t.push_back({{"fig8_chaos",
                  "rg_spectral",
                  "Superexponential growth of flow-map separations",
                  "~0.1 s",
                  "~0.5 s",
                  {{"family", "FB"}, {"p", "10.3"}, {"alpha", "0.25"},
                   {"delta_alpha", "1e-15"}, {"N_range", "0..18"},
                   {"state_scales", "10,12,14,16,18"}, {"init", stair},
                   {"seed", "12345"}},
                  {{"family", "FB"}, {"p", "10.3"}, {"alpha", "0.25"},
                   {"delta_alpha", "1e-15"}, {"N_range", "0..20"},
                   {"state_scales", "12,14,16,18,20"}, {"init", stair},
                   {"seed", "12345"}}},
                 run_fig8});

    t.push_back({{"fig9_pdfs",
                  "stochastic_rg",
                  "Kernel marginal PDFs collapsing across scales and noises",
                  "~20 min",
                  "~10 h",
                  {{"family", "FB"}, {"p", "10.3"}, {"N_range", "14..16"},
                   {"samples", "100000"}, {"noises", "mu;mutilde"},
                   {"components", "2,3,4"}, {"bins", "128"},
                   {"emit_samples", "off"}, {"init", stair}, {"seed", "12345"}},
                  {{"family", "FB"}, {"p", "10.3"}, {"N_range", "16..18"},
                   {"samples", "1000000"}, {"noises", "mu;mutilde"},
                   {"components", "2,3,4"}, {"bins", "128"},
                   {"emit_samples", "off"}, {"init", stair}, {"seed", "12345"}}},
                 run_fig9});

    t.push_back({{"fig10_stochastic_eigenmode",
                  "stochastic_rg",
                  "Signed-histogram rescaling and the stochastic eigenvalue",
                  "~30 min",
                  "days",
                  {{"family", "FB"}, {"p", "10.3"}, {"N_range", "13..16"},
                   {"samples", "200000"}, {"noise", "mu"}, {"components", "2,3"},
                   {"bins", "128"}, {"init", stair}, {"seed", "12345"}},
                  {{"family", "FB"}, {"p", "10.3"}, {"N_range", "14..18"},
                   {"samples", "10000000"}, {"noise", "mu"}, {"components", "2,3"},
                   {"bins", "128"}, {"init", stair}, {"seed", "12345"}}},
                 run_fig10});

    t.push_back({{"fig11_moments",
                  "stochastic_rg",
                  "Kernel moments across the family parameter at two scales",
                  "~15 min",
                  "~20 h",
                  {{"family", "FB"}, {"p_grid", "10.3:10.8:0.05"}, {"N", "15"},
                   {"samples", "10000"}, {"component", "2"}, {"noise", "mu"},
                   {"init", stair}, {"seed", "12345"}},
                  {{"family", "FB"}, {"p_grid", "10.3:10.8:0.025"}, {"N", "19"},
                   {"samples", "100000"}, {"component", "2"}, {"noise", "mu"},
                   {"init", stair}, {"seed", "12345"}}},
                 run_fig11});

    t.push_back({{"fig12_stochastic_period2",
                  "stochastic_rg",
                  "Period-2 kernel attractor and the noise-swap of its limits",
                  "~15 min",
                  "~10 h",
                  {{"family", "FB"}, {"p", "10.7"}, {"N_range", "15..18"},
                   {"samples", "20000"}, {"noises", "mu;mutilde"},
                   {"components", "2,3,4"}, {"bins", "128"}, {"init", stair},
                   {"seed", "12345"}},
                  {{"family", "FB"}, {"p", "10.7"}, {"N_range", "21..24"},
                   {"samples", "100000"}, {"noises", "mu;mutilde"},
                   {"components", "2,3,4"}, {"bins", "128"}, {"init", stair},
                   {"seed", "12345"}}},
                 run_fig12});

    t.push_back({{"app_structure_functions",
                  "cascade_stats",
                  "Forced steady state: structure functions, exponents, flux balance",
                  "~2 s",
                  "~10 min",
                  {{"family", "FB"}, {"p", "10.3"}, {"alpha", "0.25"}, {"N", "12"},
                   {"transient", "100"}, {"window", "5000"}, {"p_max", "8"},
                   {"inertial", "3..7"}, {"init", stair}, {"seed", "12345"}},
                  {{"family", "FB"}, {"p", "10.3"}, {"alpha", "0.25"}, {"N", "17"},
                   {"transient", "100"}, {"window", "40000"}, {"p_max", "8"},
                   {"inertial", "3..12"}, {"init", stair}, {"seed", "12345"}}},
                 run_structure_functions});

    return t;
  }();
  return table;
}

const Entry& find_entry(const std::string& name) {
  for (const Entry& e : entries())
    if (e.info.name == name) return e;
  throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const Entry& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  return find_entry(name).info;
}

std::string list_experiments_text(const std::string& module_filter) {
  std::ostringstream out;
  for (const ExperimentInfo& e : experiment_registry()) {
    if (!module_filter.empty() && e.module != module_filter) continue;
    out << e.name << "  [" << e.module << "]\n    " << e.description
        << "\n    runtime: desk " << e.runtime_desk << ", paper " << e.runtime_paper
        << "\n";
  }
  return out.str();
}

nlohmann::json list_experiments_json(const std::string& module_filter) {
  nlohmann::json arr = nlohmann::json::array();
  for (const ExperimentInfo& e : experiment_registry()) {
    if (!module_filter.empty() && e.module != module_filter) continue;
    arr.push_back({{"name", e.name},
                   {"module", e.module},
                   {"description", e.description},
                   {"runtime", {{"desk", e.runtime_desk}, {"paper", e.runtime_paper}}},
                   {"defaults", {{"desk", e.desk}, {"paper", e.paper}}}});
  }
  return {{"experiments", arr}};
}

std::vector<double> make_initial_condition(const std::string& init, int n_cap) {
  std::vector<double> a(static_cast<std::size_t>(n_cap) + 1, 0.0);
  if (init == "staircase") {
    for (int n = 0; n <= 4 && n <= n_cap; ++n) a[n] = 1.0 - n / 5.0;
    return a;
  }
  if (init.rfind("powerlaw:", 0) == 0) {
    const double h = parse_double(init.substr(9));
    if (!(h > 0.0)) throw std::invalid_argument("powerlaw exponent must be > 0");
    for (int n = 0; n <= n_cap; ++n) a[n] = std::pow(std::ldexp(1.0, -n), h);
    return a;
  }
  if (init.rfind("vector:", 0) == 0) {
    const auto vals = parse_double_list(init.substr(7));
    for (std::size_t i = 0; i < vals.size() && i < a.size(); ++i) a[i] = vals[i];
    return a;
  }
  throw std::invalid_argument("unknown initial condition: " + init);
}

RunReport run_experiment(const RunRequest& request) {
  const Entry& entry = find_entry(request.name);
  if (request.preset != "desk" && request.preset != "paper")
    throw std::invalid_argument("preset must be 'desk' or 'paper'");
  const KvMap& defaults = request.preset == "desk" ? entry.info.desk : entry.info.paper;

  Resolved rd;
  rd.kv = defaults;
  for (const auto& [k, v] : request.file_config) {
    if (!defaults.count(k))
      throw std::invalid_argument("unknown config key for " + request.name + ": " + k);
    rd.kv[k] = v;
  }
  if (request.seed_override) rd.kv["seed"] = std::to_string(*request.seed_override);
  rd.seed = parse_u64(rd.kv.at("seed"));
  rd.threads = request.threads_override.value_or(0);

  RunEmitter em(request.outdir, request.overwrite);
  nlohmann::json& meta = em.metadata();
  meta["experiment"] = request.name;
  meta["preset"] = request.preset;
  meta["tool_version"] = kToolVersion;
  meta["seed"] = rd.seed;
  meta["threads"] = rd.threads;
  meta["config"] = rd.kv;
  if (rd.kv.count("init")) meta["initial_condition"] = initial_json(rd.kv.at("init"));

  const auto t0 = std::chrono::steady_clock::now();
  entry.run(rd, em);
  const auto t1 = std::chrono::steady_clock::now();
  meta["wall_seconds"] = std::chrono::duration<double>(t1 - t0).count();

  RunReport report;
  report.outdir = request.outdir;
  report.files = em.finalize();
  report.metadata = em.metadata();
  return report;
}

RunReport run_simulate(const KvMap& config, std::optional<std::uint64_t> seed_override,
                       const std::filesystem::path& outdir, bool overwrite) {
  KvMap kv{{"family", "FA"},    {"p", "5.0"},     {"N", "8"},
           {"alpha", "0.25"},   {"noise", ""},    {"forcing", "off"},
           {"init", "staircase"}, {"t_end", "1"}, {"probes", "0"},
           {"n_cap", ""},       {"seed", "12345"}};
  for (const auto& [k, v] : config) {
    if (!kv.count(k)) throw std::invalid_argument("unknown simulate key: " + k);
    kv[k] = v;
  }
  if (seed_override) kv["seed"] = std::to_string(*seed_override);

  const int N = parse_int(kv.at("N"));
  const int n_cap = kv.at("n_cap").empty() ? N + 4 : parse_int(kv.at("n_cap"));
  const TransferSpec spec{family_from_name(kv.at("family")), parse_double(kv.at("p"))};
  const Dissipation diss = kv.at("noise").empty()
                               ? Dissipation::deterministic(parse_double(kv.at("alpha")))
                               : parse_noise(kv.at("noise"));
  const SimConfig cfg{spec, {N, diss}, parse_bool(kv.at("forcing")), n_cap};
  const auto a = make_initial_condition(kv.at("init"), n_cap);
  const auto probes = parse_int_list(kv.at("probes"));
  const int t_end = parse_int(kv.at("t_end"));
  RngStream rng(parse_u64(kv.at("seed")), 0);

  const auto t0 = std::chrono::steady_clock::now();
  const SimulateResult result = simulate(a, cfg, t_end, probes, &rng);
  const auto t1 = std::chrono::steady_clock::now();

  RunEmitter em(outdir, overwrite);
  Csv traj("scale,t,u");
  const double tau_n = std::ldexp(1.0, -N);
  for (const TrajectoryRecord& r : result.records)
    traj.cell(static_cast<std::int64_t>(r.scale))
        .cell(static_cast<double>(r.value_tick) * tau_n)
        .cell(r.value)
        .end_row();
  em.add_file("trajectory.csv", traj.str());
  em.add_file("final_state.csv", state_csv(result.final_state.values));

  nlohmann::json& meta = em.metadata();
  meta["experiment"] = "simulate";
  meta["tool_version"] = kToolVersion;
  meta["config"] = kv;
  meta["seed"] = parse_u64(kv.at("seed"));
  meta["initial_condition"] = initial_json(kv.at("init"));
  meta["ledger"] = ledger_json(result.ledger, result.initial_total);
  meta["wall_seconds"] = std::chrono::duration<double>(t1 - t0).count();

  RunReport report;
  report.outdir = outdir;
  report.files = em.finalize();
  report.metadata = em.metadata();
  return report;
}

}  // namespace rglat
