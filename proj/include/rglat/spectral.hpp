#pragma once

#include <span>
#include <vector>

#include "rglat/flow_algebra.hpp"
#include "rglat/numeric.hpp"

namespace rglat {

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

// Cauchy difference of consecutive flow maps: phi^(N+1,alpha)(a) - phi^(N,alpha)(a).
std::vector<double> cauchy_difference(int viscous_scale, double alpha,
                                      const TransferSpec& spec,
                                      std::span<const double> a, int n_cap);

struct RhoEstimate {
  double rho = 0.0;
  double dispersion = 0.0;  // spread of the last <= 3 component ratios
  int probe = 4;
};

// Leading eigenvalue from the component ratio of consecutive Cauchy
// differences, reported at the largest available pair. Probe components
// smaller than 1e-30 in magnitude are rejected as degenerate.
RhoEstimate estimate_rho(std::span<const std::vector<double>> deltas, int probe);

// psi(a) ~ delta / (c_alpha * (rho - 1) * rho^N).
std::vector<double> estimate_eigenvector(std::span<const double> delta, double rho,
                                         double c_alpha, int viscous_scale);

// Least-squares scalar c such that delta ~ c * (rho - 1) * rho^N * psi_ref,
// fitted over components 0..max_component.
double fit_scale_coefficient(std::span<const double> delta,
                             std::span<const double> psi_ref, double rho,
                             int viscous_scale, int max_component);

struct GrowthCurve {
  std::vector<int> scales;
  std::vector<double> norms;     // ||phi^(N,a+da)(x) - phi^(N,a)(x)||_2
  std::vector<double> loglog;    // log log(norm/dalpha); NaN where undefined
  std::vector<double> state_norms;
  double delta_alpha = 0.0;
};

// Separation of flow maps under a perturbation alpha -> alpha + dalpha of the
// initial regularization, per viscous scale.
GrowthCurve perturbation_growth(double alpha, double delta_alpha,
                                const TransferSpec& spec, std::span<const double> a,
                                std::span<const int> scales, int n_cap,
                                int threads = 0);

// Linear fit of log log(norm/dalpha) vs N restricted to the pre-saturation
// window norm <= saturation_ratio * ||u||.
struct GrowthFit {
  LinearFit fit;
  std::vector<int> window;
};
GrowthFit fit_growth_curve(const GrowthCurve& curve, double saturation_ratio = 1e-3);

struct BifurcationScan {
  std::vector<double> p;
  std::vector<double> u_probe_N;   // [phi^(N)]_probe per p
  std::vector<double> u_probe_N1;  // [phi^(N+1)]_probe per p
  std::vector<double> delta_sq;
  std::vector<double> rho;
  double p_pd_crossing = 0.0;  // rho(p) crossing -1, linear interpolation; NaN if absent
  double p_pd_onset = 0.0;     // root of the linear fit of delta_sq past the crossing
  double post_fit_r2 = 0.0;
  double post_window_lo = 0.0;
  double post_window_hi = 0.0;
  int probe = 4;
  int viscous_scale = 0;
};

// Parameter scan of the flow-map family: probe component at scales N and N+1,
// squared difference, eigenvalue estimate, and both bifurcation-point
// estimators.
BifurcationScan bifurcation_scan(std::span<const double> p_grid, TransferFamily family,
                                 double alpha, std::span<const double> a,
                                 int viscous_scale, int probe, int n_cap,
                                 int threads = 0);

}  // namespace rglat
