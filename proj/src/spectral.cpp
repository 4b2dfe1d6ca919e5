#include "rglat/spectral.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rglat {

namespace {
int resolve_threads(int threads) {
#ifdef _OPENMP
  return threads > 0 ? threads : omp_get_max_threads();
#else
  (void)threads;
  return 1;
#endif
}
}  // namespace

std::vector<double> cauchy_difference(int viscous_scale, double alpha,
                                      const TransferSpec& spec,
                                      std::span<const double> a, int n_cap) {
  const Dissipation d = Dissipation::deterministic(alpha);
  const FlowMap lo(viscous_scale, d, spec, n_cap);
  const FlowMap hi(viscous_scale + 1, d, spec, n_cap);
  std::vector<double> u_hi = hi(a);
  const std::vector<double> u_lo = lo(a);
  for (std::size_t i = 0; i < u_hi.size(); ++i) u_hi[i] -= u_lo[i];
  return u_hi;
}

RhoEstimate estimate_rho(std::span<const std::vector<double>> deltas, int probe) {
  if (deltas.size() < 2)
    throw std::invalid_argument("estimate_rho: need >= 2 consecutive differences");
  std::vector<double> ratios;
  const std::size_t first =
      deltas.size() > 4 ? deltas.size() - 4 : std::size_t{0};
  for (std::size_t i = first; i + 1 < deltas.size(); ++i) {
    const double denom = deltas[i][probe];
    if (std::abs(denom) < 1e-30)
      throw std::runtime_error("estimate_rho: degenerate probe component");
    ratios.push_back(deltas[i + 1][probe] / denom);
  }
  RhoEstimate est;
  est.probe = probe;
  est.rho = ratios.back();
  for (double r : ratios) est.dispersion = std::max(est.dispersion, std::abs(r - est.rho));
  return est;
}

std::vector<double> estimate_eigenvector(std::span<const double> delta, double rho,
                                         double c_alpha, int viscous_scale) {
  if (rho == 0.0 || rho == 1.0 || c_alpha == 0.0)
    throw std::invalid_argument("estimate_eigenvector: invalid rho or coefficient");
  const double denom = c_alpha * (rho - 1.0) * ipow(rho, viscous_scale);
  std::vector<double> psi(delta.begin(), delta.end());
  for (double& v : psi) v /= denom;
  return psi;
}

double fit_scale_coefficient(std::span<const double> delta,
                             std::span<const double> psi_ref, double rho,
                             int viscous_scale, int max_component) {
  const double factor = (rho - 1.0) * ipow(rho, viscous_scale);
  double num = 0.0, den = 0.0;
  const std::size_t limit =
      std::min({delta.size(), psi_ref.size(), static_cast<std::size_t>(max_component) + 1});
  for (std::size_t n = 0; n < limit; ++n) {
    const double m = factor * psi_ref[n];
    num += delta[n] * m;
    den += m * m;
  }
  if (den == 0.0) throw std::runtime_error("fit_scale_coefficient: zero reference mode");
  return num / den;
}

GrowthCurve perturbation_growth(double alpha, double delta_alpha,
                                const TransferSpec& spec, std::span<const double> a,
                                std::span<const int> scales, int n_cap, int threads) {
  if (delta_alpha < 0.0)
    throw std::invalid_argument("perturbation_growth: delta_alpha must be >= 0");
  GrowthCurve curve;
  curve.delta_alpha = delta_alpha;
  curve.scales.assign(scales.begin(), scales.end());
  const std::size_t count = curve.scales.size();
  curve.norms.assign(count, 0.0);
  curve.loglog.assign(count, std::numeric_limits<double>::quiet_NaN());
  curve.state_norms.assign(count, 0.0);

  const std::vector<double> a0(a.begin(), a.end());
  const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (std::size_t i = 0; i < count; ++i) {
    const int N = curve.scales[i];
    const FlowMap base(N, Dissipation::deterministic(alpha), spec, n_cap);
    const FlowMap perturbed(N, Dissipation::deterministic(alpha + delta_alpha), spec,
                            n_cap);
    const std::vector<double> u = base(a0);
    const std::vector<double> v = perturbed(a0);
    double s = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
      const double d = v[j] - u[j];
      s += d * d;
    }
    curve.norms[i] = std::sqrt(s);
    curve.state_norms[i] = l2_norm(u);
    if (delta_alpha > 0.0 && curve.norms[i] > delta_alpha)
      curve.loglog[i] = std::log(std::log(curve.norms[i] / delta_alpha));
  }
  return curve;
}

GrowthFit fit_growth_curve(const GrowthCurve& curve, double saturation_ratio) {
  std::vector<double> xs, ys;
  GrowthFit out;
  for (std::size_t i = 0; i < curve.scales.size(); ++i) {
    if (!std::isfinite(curve.loglog[i])) continue;
    if (curve.norms[i] > saturation_ratio * curve.state_norms[i]) continue;
    xs.push_back(curve.scales[i]);
    ys.push_back(curve.loglog[i]);
    out.window.push_back(curve.scales[i]);
  }
  if (xs.size() < 3)
    throw std::runtime_error("fit_growth_curve: fewer than 3 pre-saturation points");
  out.fit = linear_fit(xs, ys);
  return out;
}

BifurcationScan bifurcation_scan(std::span<const double> p_grid, TransferFamily family,
                                 double alpha, std::span<const double> a,
                                 int viscous_scale, int probe, int n_cap,
                                 int threads) {
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (!(p_grid[i] > p_grid[i - 1]))
      throw std::invalid_argument("bifurcation_scan: p grid must be strictly increasing");

  BifurcationScan scan;
  scan.p.assign(p_grid.begin(), p_grid.end());
  scan.probe = probe;
  scan.viscous_scale = viscous_scale;
  const std::size_t count = scan.p.size();
  scan.u_probe_N.assign(count, 0.0);
  scan.u_probe_N1.assign(count, 0.0);
  scan.delta_sq.assign(count, 0.0);
  scan.rho.assign(count, 0.0);

  const std::vector<double> a0(a.begin(), a.end());
  const Dissipation d = Dissipation::deterministic(alpha);
  const int nt = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (std::size_t i = 0; i < count; ++i) {
    const TransferSpec spec{family, scan.p[i]};
    const std::vector<double> u_m1 = FlowMap(viscous_scale - 1, d, spec, n_cap)(a0);
    const std::vector<double> u_0 = FlowMap(viscous_scale, d, spec, n_cap)(a0);
    const std::vector<double> u_p1 = FlowMap(viscous_scale + 1, d, spec, n_cap)(a0);
    scan.u_probe_N[i] = u_0[probe];
    scan.u_probe_N1[i] = u_p1[probe];
    const double dv = u_p1[probe] - u_0[probe];
    scan.delta_sq[i] = dv * dv;
    scan.rho[i] = dv / (u_0[probe] - u_m1[probe]);
  }

  // rho(p) decreases through -1 at the period-doubling point.
  scan.p_pd_crossing = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < count; ++i) {
    if (scan.rho[i] >= -1.0 && scan.rho[i + 1] < -1.0) {
      const double frac = (-1.0 - scan.rho[i]) / (scan.rho[i + 1] - scan.rho[i]);
      scan.p_pd_crossing = scan.p[i] + frac * (scan.p[i + 1] - scan.p[i]);
      break;
    }
  }

  // Linear growth of delta_sq past the bifurcation; the fitted root is the
  // second estimator of the bifurcation point.
  scan.p_pd_onset = std::numeric_limits<double>::quiet_NaN();
  scan.post_fit_r2 = std::numeric_limits<double>::quiet_NaN();
  double window_lo;
  if (std::isfinite(scan.p_pd_crossing)) {
    window_lo = scan.p_pd_crossing;
  } else {
    double dmax = 0.0;
    for (double v : scan.delta_sq) dmax = std::max(dmax, v);
    window_lo = scan.p.back();
    for (std::size_t i = 0; i < count; ++i)
      if (scan.delta_sq[i] > 0.05 * dmax) {
        window_lo = scan.p[i];
        break;
      }
  }
  const double window_hi = window_lo + 1.05;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < count; ++i) {
    if (scan.p[i] > window_lo && scan.p[i] <= window_hi) {
      xs.push_back(scan.p[i]);
      ys.push_back(scan.delta_sq[i]);
    }
  }
  if (xs.size() >= 4) {
    const LinearFit fit = linear_fit(xs, ys);
    scan.post_fit_r2 = fit.r2;
    if (fit.slope > 0.0) scan.p_pd_onset = -fit.intercept / fit.slope;
    scan.post_window_lo = xs.front();
    scan.post_window_hi = xs.back();
  }
  return scan;
}

}  // namespace rglat
