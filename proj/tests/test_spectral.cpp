#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rglat/experiments.hpp"
#include "rglat/rng.hpp"
#include "rglat/spectral.hpp"

using namespace rglat;

namespace {

const TransferSpec kFa5{TransferFamily::FA, 5.0};
const TransferSpec kFb103{TransferFamily::FB, 10.3};

// Synthetic geometric Cauchy differences c (rho-1) rho^N psi.
std::vector<std::vector<double>> synthetic_deltas(double c, double rho,
                                                  const std::vector<double>& psi,
                                                  int n_lo, int n_hi) {
  std::vector<std::vector<double>> out;
  for (int N = n_lo; N <= n_hi; ++N) {
    std::vector<double> d(psi);
    const double s = c * (rho - 1.0) * ipow(rho, N);
    for (double& v : d) v *= s;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

TEST_CASE("estimate_rho is exact on synthetic geometric sequences") {
  const std::vector<double> psi{0.5, -0.3, 0.2, -0.05, 0.11, 0.02};
  // rho = -0.5 divides out exactly in binary floating point.
  auto deltas = synthetic_deltas(1.3, -0.5, psi, 4, 12);
  CHECK(estimate_rho(deltas, 4).rho == -0.5);

  for (double rho : {-0.42, -0.9, -0.07, 0.3, 0.77}) {
    auto d = synthetic_deltas(0.7, rho, psi, 2, 10);
    CHECK(estimate_rho(d, 2).rho == doctest::Approx(rho).epsilon(1e-12));
  }
}

TEST_CASE("estimate_rho rejects degenerate probes") {
  std::vector<double> psi{0.5, 0.0, 0.2};
  auto deltas = synthetic_deltas(1.0, -0.4, psi, 3, 8);
  CHECK_THROWS_AS(estimate_rho(deltas, 1), std::runtime_error);
  CHECK_THROWS_AS(estimate_rho(std::vector<std::vector<double>>{psi}, 0),
                  std::invalid_argument);
}

TEST_CASE("estimate_eigenvector recovers the synthetic mode exactly") {
  const std::vector<double> psi{0.5, -0.3, 0.2, -0.05, 0.11, 0.02};
  const double c = 1.7, rho = -0.45;
  auto deltas = synthetic_deltas(c, rho, psi, 6, 10);
  const auto rec = estimate_eigenvector(deltas[2], rho, c, 8);
  for (std::size_t n = 0; n < psi.size(); ++n)
    CHECK(rec[n] == doctest::Approx(psi[n]).epsilon(1e-12));
}

TEST_CASE("eigenvector collapse error is O(noise)") {
  const std::vector<double> psi{0.5, -0.3, 0.2, -0.05, 0.11, 0.02};
  const double rho = -0.5, c = 1.0;
  RngStream rng(31, 0);
  for (double eps : {1e-6, 1e-3}) {
    auto deltas = synthetic_deltas(c, rho, psi, 6, 9);
    for (auto& d : deltas)
      for (double& v : d) v *= 1.0 + eps * (2.0 * rng.uniform01() - 1.0);
    std::vector<std::vector<double>> recs;
    for (int i = 0; i < 4; ++i)
      recs.push_back(estimate_eigenvector(deltas[i], rho, c, 6 + i));
    double spread = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i)
      for (std::size_t j = i + 1; j < recs.size(); ++j)
        for (std::size_t n = 0; n < psi.size(); ++n)
          spread = std::max(spread, std::abs(recs[i][n] - recs[j][n]));
    CHECK(spread <= 10.0 * eps);  // relative to max|psi| = 0.5
  }
}

TEST_CASE("fit_scale_coefficient recovers the synthetic coefficient") {
  const std::vector<double> psi{0.5, -0.3, 0.2, -0.05, 0.11, 0.02, 0.0, 0.0, 0.0};
  auto deltas = synthetic_deltas(1.61, -0.42, psi, 5, 9);
  CHECK(fit_scale_coefficient(deltas[1], psi, -0.42, 6, 8) ==
        doctest::Approx(1.61).epsilon(1e-12));
}

TEST_CASE("cauchy differences alternate sign at the stable fixed point") {
  // rho < 0 signature: consecutive differences flip sign on the dominant
  // components.
  const int n_cap = 16;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<std::vector<double>> deltas;
  for (int N = 10; N <= 13; ++N)
    deltas.push_back(cauchy_difference(N, 0.25, kFa5, a, n_cap));
  for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
    for (int n = 3; n <= 5; ++n) {
      CHECK(deltas[i][n] * deltas[i + 1][n] < 0.0);
    }
  }
}

TEST_CASE("deterministic eigenvalue near -0.42 already at moderate N") {
  const int n_cap = 20;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<std::vector<double>> deltas;
  for (int N = 10; N <= 15; ++N)
    deltas.push_back(cauchy_difference(N, 0.25, kFa5, a, n_cap));
  const RhoEstimate est = estimate_rho(deltas, 4);
  CHECK(est.rho == doctest::Approx(-0.42).epsilon(0.15));
}

TEST_CASE("perturbation growth: delta_alpha = 0 gives the zero curve") {
  const int n_cap = 12;
  const auto a = make_initial_condition("staircase", n_cap);
  const std::vector<int> scales{0, 2, 4, 6};
  const GrowthCurve curve = perturbation_growth(0.25, 0.0, kFb103, a, scales, n_cap);
  for (double v : curve.norms) CHECK(v == 0.0);
  for (double v : curve.loglog) CHECK(std::isnan(v));
}

TEST_CASE("perturbation growth: chaotic family grows, regular family decays") {
  const int n_cap = 18;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<int> scales;
  for (int N = 0; N <= 14; ++N) scales.push_back(N);

  const GrowthCurve chaotic =
      perturbation_growth(0.25, 1e-15, kFb103, a, scales, n_cap);
  int rises = 0;
  for (std::size_t i = 1; i < chaotic.norms.size(); ++i)
    if (chaotic.norms[i] > chaotic.norms[i - 1]) ++rises;
  CHECK(rises >= 10);
  CHECK(chaotic.norms.back() > 1e3 * chaotic.norms.front());

  const GrowthCurve regular = perturbation_growth(0.25, 1e-15, kFa5, a, scales, n_cap);
  // At the stable fixed point the separation stays within a few orders of the
  // applied perturbation instead of exploding.
  for (double v : regular.norms) CHECK(v < 1e-10);
  CHECK(regular.norms.back() < 10.0 * regular.norms[4]);
}

TEST_CASE("bifurcation scan on a synthetic-scale grid") {
  // Small N keeps this a smoke test of the bookkeeping; the acceptance suite
  // runs the full-resolution scan.
  const int N = 12, n_cap = 18;
  const auto a = make_initial_condition("staircase", n_cap);
  std::vector<double> grid;
  for (double p = 6.0; p <= 7.8 + 1e-9; p += 0.2) grid.push_back(p);
  const BifurcationScan scan =
      bifurcation_scan(grid, TransferFamily::FA, 0.25, a, N, 4, n_cap);
  CHECK(scan.p.size() == grid.size());
  // rho decreases through -1 somewhere in the scan window.
  CHECK(std::isfinite(scan.p_pd_crossing));
  CHECK(scan.p_pd_crossing > 6.0);
  CHECK(scan.p_pd_crossing < 7.8);
  // delta_sq rises past the crossing.
  CHECK(scan.delta_sq.back() > 10.0 * scan.delta_sq.front());
  CHECK_THROWS_AS(bifurcation_scan(std::vector<double>{2.0, 1.0}, TransferFamily::FA,
                                   0.25, a, N, 4, n_cap),
                  std::invalid_argument);
}

TEST_CASE("growth-curve fit wants at least three pre-saturation points") {
  GrowthCurve c;
  c.scales = {0, 1};
  c.norms = {1e-15, 1e-14};
  c.loglog = {std::nan(""), std::nan("")};
  c.state_norms = {1.0, 1.0};
  CHECK_THROWS_AS(fit_growth_curve(c), std::runtime_error);
}
