#include "rglat/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rglat/numeric.hpp"
#include "rglat/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rglat {

std::span<const double> SampleSet::column(int scale) const {
  for (std::size_t c = 0; c < components.size(); ++c)
    if (components[c] == scale) return columns[c];
  throw std::out_of_range("SampleSet: component " + std::to_string(scale) +
                          " not stored");
}

namespace {

SampleSet prepare_set(int viscous_scale, Dissipation noise, const TransferSpec& spec,
                      std::size_t count, std::uint64_t seed,
                      std::span<const int> components, int n_cap,
                      const std::string& initial_id) {
  if (count < 1) throw std::invalid_argument("sample_kernel: need at least one sample");
  SampleSet set;
  set.components.assign(components.begin(), components.end());
  for (int c : set.components)
    if (c < 0 || c > n_cap) throw std::invalid_argument("sample component out of range");
  set.columns.assign(set.components.size(), std::vector<double>(count, 0.0));
  set.seed = seed;
  set.viscous_scale = viscous_scale;
  set.noise = noise;
  set.transfer = spec;
  set.initial_id = initial_id;
  return set;
}

inline void fill_sample(SampleSet& set, std::span<const double> a,
                        const SimConfig& cfg, std::size_t index) {
  RngStream rng(set.seed, index);
  EnergyLedger ledger;
  const std::vector<double> u = step_unit_interval(a, cfg, &rng, ledger);
  for (std::size_t c = 0; c < set.components.size(); ++c)
    set.columns[c][index] = u[set.components[c]];
}

}  // namespace

SampleSet sample_kernel_serial(std::span<const double> a, int viscous_scale,
                               Dissipation noise, const TransferSpec& spec,
                               std::size_t count, std::uint64_t seed,
                               std::span<const int> components, int n_cap,
                               const std::string& initial_id) {
  SampleSet set =
      prepare_set(viscous_scale, noise, spec, count, seed, components, n_cap, initial_id);
  const SimConfig cfg{spec, {viscous_scale, noise}, false, n_cap};
  for (std::size_t i = 0; i < count; ++i) fill_sample(set, a, cfg, i);
  return set;
}

SampleSet sample_kernel(std::span<const double> a, int viscous_scale,
                        Dissipation noise, const TransferSpec& spec,
                        std::size_t count, std::uint64_t seed,
                        std::span<const int> components, int n_cap, int threads,
                        const std::string& initial_id) {
  SampleSet set =
      prepare_set(viscous_scale, noise, spec, count, seed, components, n_cap, initial_id);
  const SimConfig cfg{spec, {viscous_scale, noise}, false, n_cap};
#ifdef _OPENMP
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (std::size_t i = 0; i < count; ++i) fill_sample(set, a, cfg, i);
#else
  (void)threads;
  for (std::size_t i = 0; i < count; ++i) fill_sample(set, a, cfg, i);
#endif
  return set;
}

KernelSampler::KernelSampler(int viscous_scale, Dissipation noise,
                             TransferSpec transfer, int n_cap)
    : transfer_(transfer), noise_(noise), viscous_scale_(viscous_scale), n_cap_(n_cap) {
  SimConfig cfg{transfer_, {viscous_scale_, noise_}, false, n_cap_};
  cfg.validate();
}

std::vector<double> KernelSampler::sample(std::span<const double> a,
                                          RngStream& rng) const {
  const SimConfig cfg{transfer_, {viscous_scale_, noise_}, false, n_cap_};
  EnergyLedger ledger;
  return step_unit_interval(a, cfg, &rng, ledger);
}

std::vector<double> stochastic_rg_apply(const KernelSampler& phi,
                                        std::span<const double> a, RngStream& draw1,
                                        RngStream& draw2) {
  if (a.empty()) throw std::invalid_argument("stochastic_rg_apply: empty state");
  const double a0 = a[0];
  const double a1 = a.size() > 1 ? a[1] : 0.0;
  const double xi0 = phi.transfer().fraction(a0, a1) * a0;

  std::vector<double> inner = phi.sample(shift_plus(a), draw1);
  inner[0] += xi0;
  const std::vector<double> outer = phi.sample(inner, draw2);
  std::vector<double> out = shift_minus(outer);
  out[0] = a0 - xi0;
  for (double& v : out) {
    if (v < 0.0) {
      if (v < -1e-14)
        throw std::runtime_error("stochastic_rg_apply produced a negative energy");
      v = 0.0;
    }
  }
  return out;
}

BinGrid pooled_grid(std::span<const SampleSet* const> sets, int component, int bins) {
  if (sets.empty()) throw std::invalid_argument("pooled_grid: no sample sets");
  if (bins < 1) throw std::invalid_argument("pooled_grid: bins must be >= 1");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const SampleSet* s : sets) {
    for (double v : s->column(component)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo <= hi)) throw std::invalid_argument("pooled_grid: empty sample sets");
  if (lo == hi) {
    // Degenerate (e.g. deterministic component): one bin carries everything.
    const double pad = std::max(1e-12, 1e-9 * std::abs(lo));
    lo -= pad;
    hi += pad;
  }
  return BinGrid{lo, hi, bins};
}

HistogramPDF histogram_pdf(std::span<const double> values, const BinGrid& grid) {
  if (values.empty()) throw std::invalid_argument("histogram_pdf: empty sample set");
  BinGrid g = grid;
  bool extended = false;
  for (double v : values) {
    if (v < g.lo || v > g.hi) {
      g.lo = std::min(g.lo, v);
      g.hi = std::max(g.hi, v);
      extended = true;
    }
  }
  HistogramPDF pdf;
  pdf.grid = g;
  pdf.extended = extended;
  pdf.count = values.size();
  pdf.density.assign(static_cast<std::size_t>(g.bins), 0.0);
  const double w = g.width();
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - g.lo) / w);
    if (b >= pdf.density.size()) b = pdf.density.size() - 1;
    pdf.density[b] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(pdf.count) * w);
  for (double& d : pdf.density) d *= norm;
  return pdf;
}

HistogramPDF marginal_pdf(const SampleSet& samples, int component, const BinGrid& grid) {
  return histogram_pdf(samples.column(component), grid);
}

SignedHistogram delta_pdf(const HistogramPDF& pdf_hi, const HistogramPDF& pdf_lo) {
  if (!(pdf_hi.grid == pdf_lo.grid))
    throw std::invalid_argument("delta_pdf: bin grids differ");
  SignedHistogram d;
  d.grid = pdf_hi.grid;
  d.count = std::min(pdf_hi.count, pdf_lo.count);
  d.density.resize(pdf_hi.density.size());
  for (std::size_t i = 0; i < d.density.size(); ++i)
    d.density[i] = pdf_hi.density[i] - pdf_lo.density[i];
  return d;
}

double ks_distance(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> xs(x.begin(), x.end());
  std::vector<double> ys(y.begin(), y.end());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double nx = static_cast<double>(xs.size());
  const double ny = static_cast<double>(ys.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] == v) ++i;
    while (j < ys.size() && ys[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx -
                             static_cast<double>(j) / ny));
  }
  return std::max(d, 0.0);
}

double ks_critical(std::size_t m, std::size_t n, double alpha) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  return c * std::sqrt(static_cast<double>(m + n) / mn);
}

namespace {

// Squared L2 distance of consecutive rescaled curves, normalized by their
// joint L2 mass. Without the normalization the objective decays toward the
// |rho| -> 1 boundary (over-rescaling shrinks every curve to zero), so the
// bare bin distance has no usable interior minimum.
double collapse_objective(std::span<const DeltaSeries> series, double rho) {
  double total = 0.0;
  for (const DeltaSeries& s : series) {
    for (std::size_t j = 0; j + 1 < s.deltas.size(); ++j) {
      const SignedHistogram& d0 = s.deltas[j];
      const SignedHistogram& d1 = s.deltas[j + 1];
      const double r0 = ipow(rho, s.first_scale + static_cast<int>(j));
      const double r1 = ipow(rho, s.first_scale + static_cast<int>(j) + 1);
      const double w = d0.grid.width();
      double num = 0.0, den = 0.0;
      for (std::size_t b = 0; b < d0.density.size(); ++b) {
        const double a = d0.density[b] / r0;
        const double c = d1.density[b] / r1;
        num += (a - c) * (a - c) * w;
        den += (a * a + c * c) * w;
      }
      if (den > 0.0) total += num / den;
    }
  }
  return total;
}

}  // namespace

StochasticRhoEstimate estimate_rho_stochastic(std::span<const DeltaSeries> series) {
  if (series.empty())
    throw std::invalid_argument("estimate_rho_stochastic: no input series");
  for (const DeltaSeries& s : series) {
    if (s.deltas.size() < 3)
      throw std::invalid_argument(
          "estimate_rho_stochastic: need >= 3 consecutive signed histograms");
    for (std::size_t j = 0; j + 1 < s.deltas.size(); ++j) {
      if (!(s.deltas[j].grid == s.deltas[j + 1].grid))
        throw std::invalid_argument("estimate_rho_stochastic: grids differ");
      double overlap = 0.0;
      for (std::size_t b = 0; b < s.deltas[j].density.size(); ++b)
        overlap += std::abs(s.deltas[j].density[b]) * std::abs(s.deltas[j + 1].density[b]);
      if (overlap == 0.0)
        throw std::runtime_error("estimate_rho_stochastic: non-overlapping supports");
    }
  }

  constexpr double kLo = -0.999;
  constexpr double kHi = -0.05;
  // Coarse scan to bracket the minimum, golden-section to refine.
  constexpr int kGridPoints = 64;
  double best = kLo;
  double best_val = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i < kGridPoints; ++i) {
    const double rho = kLo + (kHi - kLo) * i / (kGridPoints - 1);
    const double val = collapse_objective(series, rho);
    if (val < best_val) {
      best_val = val;
      best = rho;
      best_i = i;
    }
  }
  const double step = (kHi - kLo) / (kGridPoints - 1);
  const double lo = std::max(kLo, best - step);
  const double hi = std::min(kHi, best + step);
  const double rho = golden_section_min(
      [&](double r) { return collapse_objective(series, r); }, lo, hi, 1e-4);

  StochasticRhoEstimate est;
  est.rho = rho;
  est.objective = collapse_objective(series, rho);
  est.boundary = (best_i == 0 || best_i == kGridPoints - 1);
  for (const DeltaSeries& s : series) {
    std::vector<double> mode(s.deltas.front().density.size(), 0.0);
    for (std::size_t j = 0; j < s.deltas.size(); ++j) {
      const double r = ipow(rho, s.first_scale + static_cast<int>(j));
      for (std::size_t b = 0; b < mode.size(); ++b)
        mode[b] += s.deltas[j].density[b] / r;
    }
    for (double& v : mode) v /= static_cast<double>(s.deltas.size());
    est.eigenmodes.push_back(std::move(mode));
  }
  return est;
}

Moments kernel_moments(std::span<const double> column) {
  if (column.empty()) throw std::invalid_argument("kernel_moments: empty column");
  Moments m;
  m.count = column.size();
  KahanSum sum;
  for (double v : column) sum.add(v);
  m.mean = sum.value() / static_cast<double>(m.count);
  if (m.count > 1) {
    KahanSum sq;
    for (double v : column) {
      const double d = v - m.mean;
      sq.add(d * d);
    }
    const double var = sq.value() / static_cast<double>(m.count - 1);
    m.stddev = std::sqrt(var);
    m.se_mean = m.stddev / std::sqrt(static_cast<double>(m.count));
    m.se_std = m.stddev / std::sqrt(2.0 * static_cast<double>(m.count - 1));
  }
  return m;
}

const char* kernel_class_name(KernelClass c) {
  switch (c) {
    case KernelClass::fixed_point: return "fixed_point";
    case KernelClass::period2: return "period2";
    default: return "undecided";
  }
}

Period2Report detect_kernel_period2(std::span<const SampleSet> primary,
                                    std::span<const SampleSet> swap_partner,
                                    std::span<const int> components) {
  if (primary.size() < 4)
    throw std::invalid_argument("detect_kernel_period2: need >= 4 consecutive scales");
  Period2Report rep;
  rep.components.assign(components.begin(), components.end());
  for (const SampleSet& s : primary) rep.scales.push_back(s.viscous_scale);
  for (std::size_t i = 1; i < rep.scales.size(); ++i)
    if (rep.scales[i] != rep.scales[i - 1] + 1)
      throw std::invalid_argument("detect_kernel_period2: scales must be consecutive");

  const std::size_t n = primary.size();
  const std::size_t m = primary.front().size();
  rep.critical = ks_critical(m, m, 0.01);

  rep.max_within_parity = 0.0;
  rep.min_cross_parity = std::numeric_limits<double>::infinity();
  double max_any = 0.0;
  for (int comp : rep.components) {
    std::vector<double> matrix(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = ks_distance(primary[i].column(comp), primary[j].column(comp));
        matrix[i * n + j] = matrix[j * n + i] = d;
        const bool same_parity = ((rep.scales[i] ^ rep.scales[j]) & 1) == 0;
        if (same_parity)
          rep.max_within_parity = std::max(rep.max_within_parity, d);
        else
          rep.min_cross_parity = std::min(rep.min_cross_parity, d);
        max_any = std::max(max_any, d);
      }
    }
    rep.distances.push_back(std::move(matrix));
  }

  if (max_any <= 2.0 * rep.critical) {
    rep.classification = KernelClass::fixed_point;
  } else if (rep.max_within_parity <= 2.0 * rep.critical &&
             rep.min_cross_parity >= 5.0 * rep.critical &&
             rep.min_cross_parity >= 5.0 * rep.max_within_parity) {
    rep.classification = KernelClass::period2;
  } else {
    rep.classification = KernelClass::undecided;
  }

  // Noise swap: the two limits are defined up to a permutation, and the
  // second noise should produce the same pair with parities exchanged.
  if (!swap_partner.empty() && rep.classification == KernelClass::period2) {
    rep.swap_checked = true;
    rep.swap_verified = true;
    for (int comp : rep.components) {
      std::vector<double> even_a, odd_a, even_b, odd_b;
      for (const SampleSet& s : primary) {
        auto col = s.column(comp);
        auto& dst = (s.viscous_scale % 2 == 0) ? even_a : odd_a;
        dst.insert(dst.end(), col.begin(), col.end());
      }
      for (const SampleSet& s : swap_partner) {
        auto col = s.column(comp);
        auto& dst = (s.viscous_scale % 2 == 0) ? even_b : odd_b;
        dst.insert(dst.end(), col.begin(), col.end());
      }
      const double swapped_eo = ks_distance(even_a, odd_b);
      const double swapped_oe = ks_distance(odd_a, even_b);
      const double aligned_ee = ks_distance(even_a, even_b);
      const double aligned_oo = ks_distance(odd_a, odd_b);
      // Each parity pool must sit clearly closer to the opposite parity of
      // the other noise than to the aligned one.
      const bool ok = aligned_ee >= 2.0 * swapped_eo && aligned_oo >= 2.0 * swapped_oe;
      rep.swap_verified = rep.swap_verified && ok;
    }
  }
  return rep;
}

}  // namespace rglat
