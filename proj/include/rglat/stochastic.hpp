#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rglat/flow_algebra.hpp"
#include "rglat/lattice.hpp"

namespace rglat {

// Monte Carlo draws of the flow kernel a -> u(1), stored column-wise for the
// selected scale components. Reproducible from (seed, provenance): sample i
// always uses the stream keyed by (seed, i), so the set is independent of
// how samples were scheduled across threads.
struct SampleSet {
  std::vector<int> components;
  std::vector<std::vector<double>> columns;  // columns[c][i], size M
  std::uint64_t seed = 0;
  int viscous_scale = 0;
  Dissipation noise;
  TransferSpec transfer;
  std::string initial_id;

  std::size_t size() const { return columns.empty() ? 0 : columns[0].size(); }
  std::span<const double> column(int scale) const;
};

// Serial reference sampler; the parallel version must reproduce it exactly.
SampleSet sample_kernel_serial(std::span<const double> a, int viscous_scale,
                               Dissipation noise, const TransferSpec& spec,
                               std::size_t count, std::uint64_t seed,
                               std::span<const int> components, int n_cap,
                               const std::string& initial_id = "");

// OpenMP sampler, embarrassingly parallel over sample indices.
SampleSet sample_kernel(std::span<const double> a, int viscous_scale,
                        Dissipation noise, const TransferSpec& spec,
                        std::size_t count, std::uint64_t seed,
                        std::span<const int> components, int n_cap,
                        int threads = 0, const std::string& initial_id = "");

// One sample of the renormalized kernel R[Phi](a), realized as two
// statistically independent kernel draws:
//   u1 ~ Phi(.|sigma_+(a)),  u2 ~ Phi(.|xi(a) + u1),
//   result = pi_0(a) - xi(a) + sigma_-(u2).
class KernelSampler {
 public:
  KernelSampler(int viscous_scale, Dissipation noise, TransferSpec transfer,
                int n_cap);
  std::vector<double> sample(std::span<const double> a, RngStream& rng) const;
  const TransferSpec& transfer() const { return transfer_; }
  int n_cap() const { return n_cap_; }

 private:
  TransferSpec transfer_;
  Dissipation noise_;
  int viscous_scale_;
  int n_cap_;
};

std::vector<double> stochastic_rg_apply(const KernelSampler& phi,
                                        std::span<const double> a, RngStream& draw1,
                                        RngStream& draw2);

struct BinGrid {
  double lo = 0.0;
  double hi = 1.0;
  int bins = 128;

  double width() const { return (hi - lo) / bins; }
  bool operator==(const BinGrid&) const = default;
};

// Uniform grid spanning the pooled min/max of one component across several
// sample sets. Differences and rescalings require one shared grid.
BinGrid pooled_grid(std::span<const SampleSet* const> sets, int component, int bins);

struct HistogramPDF {
  BinGrid grid;
  std::vector<double> density;
  std::size_t count = 0;
  bool extended = false;  // grid was widened to cover out-of-range samples
};

HistogramPDF marginal_pdf(const SampleSet& samples, int component, const BinGrid& grid);
HistogramPDF histogram_pdf(std::span<const double> values, const BinGrid& grid);

struct SignedHistogram {
  BinGrid grid;
  std::vector<double> density;
  std::size_t count = 0;  // samples per side
};

// Bin-wise difference of two densities on the same grid.
SignedHistogram delta_pdf(const HistogramPDF& pdf_hi, const HistogramPDF& pdf_lo);

// Exact two-sample Kolmogorov-Smirnov statistic (tie-aware).
double ks_distance(std::span<const double> x, std::span<const double> y);

// Critical value of the two-sample KS statistic at significance alpha.
double ks_critical(std::size_t m, std::size_t n, double alpha);

// A series of signed-histogram differences Delta p^(N) for consecutive N,
// all on one grid.
struct DeltaSeries {
  int first_scale = 0;
  std::vector<SignedHistogram> deltas;
};

struct StochasticRhoEstimate {
  double rho = 0.0;
  double objective = 0.0;
  bool boundary = false;  // minimum found at the edge of the search domain
  std::vector<std::vector<double>> eigenmodes;  // per series, mean rescaled curve
};

// Eigenvalue of the linearized kernel dynamics: the rho in (-1, -0.05] that
// best collapses Delta p^(N) / rho^N across consecutive N, in summed squared
// L2 bin distance. Golden-section refinement to 1e-3.
StochasticRhoEstimate estimate_rho_stochastic(std::span<const DeltaSeries> series);

struct Moments {
  double mean = 0.0;
  double stddev = 0.0;
  double se_mean = 0.0;
  double se_std = 0.0;
  std::size_t count = 0;
};

Moments kernel_moments(std::span<const double> column);

enum class KernelClass { fixed_point, period2, undecided };

const char* kernel_class_name(KernelClass c);

struct Period2Report {
  KernelClass classification = KernelClass::undecided;
  std::vector<int> scales;
  std::vector<int> components;
  // distances[c] is the full pairwise KS matrix for component components[c],
  // indexed [i * scales.size() + j].
  std::vector<std::vector<double>> distances;
  double critical = 0.0;  // 1% two-sample critical value at the sample size
  double max_within_parity = 0.0;
  double min_cross_parity = 0.0;
  bool swap_checked = false;
  bool swap_verified = false;
};

// Classify the per-N marginals as a fixed point or a period-2 cycle of the
// kernel dynamics. `primary` holds sample sets at consecutive N for one
// noise; `swap_partner`, when present, holds the same N for the second noise
// and is used to verify that the two limits are exchanged between noises.
Period2Report detect_kernel_period2(std::span<const SampleSet> primary,
                                    std::span<const SampleSet> swap_partner,
                                    std::span<const int> components);

}  // namespace rglat
