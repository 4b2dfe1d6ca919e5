#include "rglat/flow_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace rglat {

std::vector<double> shift_plus(std::span<const double> a) {
  std::vector<double> out(a.size(), 0.0);
  if (a.size() > 1) std::copy(a.begin() + 1, a.end(), out.begin());
  return out;
}

std::vector<double> shift_minus(std::span<const double> a) {
  std::vector<double> out(a.size(), 0.0);
  if (a.size() > 1) std::copy(a.begin(), a.end() - 1, out.begin() + 1);
  return out;
}

std::vector<double> project_zero(std::span<const double> a) {
  std::vector<double> out(a.size(), 0.0);
  if (!a.empty()) out[0] = a[0];
  return out;
}

std::vector<double> xi_transfer(std::span<const double> a, const TransferSpec& spec) {
  std::vector<double> out(a.size(), 0.0);
  if (a.empty()) return out;
  const double a0 = a[0];
  const double a1 = a.size() > 1 ? a[1] : 0.0;
  out[0] = spec.fraction(a0, a1) * a0;
  return out;
}

FlowMap::FlowMap(int viscous_scale, Dissipation dissipation, TransferSpec transfer,
                 int n_cap)
    : transfer_(transfer),
      dissipation_(dissipation),
      sim_scale_(viscous_scale),
      n_cap_(n_cap) {
  if (!dissipation.is_deterministic())
    throw std::invalid_argument("FlowMap requires deterministic dissipation");
  SimConfig cfg{transfer_, {sim_scale_, dissipation_}, false, n_cap_};
  cfg.validate();
}

FlowMap FlowMap::rg_composite(const FlowMap& base, int depth) {
  if (depth < 1) throw std::invalid_argument("rg_composite: depth must be >= 1");
  FlowMap out = base;
  out.rg_depth_ = base.rg_depth_ + depth;
  return out;
}

std::vector<double> FlowMap::operator()(std::span<const double> a) const {
  if (rg_depth_ == 0) {
    SimConfig cfg{transfer_, {sim_scale_, dissipation_}, false, n_cap_};
    return step_unit_interval(a, cfg);
  }
  FlowMap base = *this;
  --base.rg_depth_;
  return rg_apply(base, a);
}

std::vector<double> rg_apply(const FlowMap& phi, std::span<const double> a) {
  if (a.empty()) throw std::invalid_argument("rg_apply: empty state");
  const double a0 = a[0];
  const double a1 = a.size() > 1 ? a[1] : 0.0;
  const double xi0 = phi.transfer().fraction(a0, a1) * a0;

  std::vector<double> inner = phi(shift_plus(a));
  inner[0] += xi0;
  std::vector<double> outer = phi(inner);
  std::vector<double> out = shift_minus(outer);
  out[0] = a0 - xi0;

  for (double& v : out) {
    if (v < 0.0) {
      if (v < -1e-14) throw std::runtime_error("rg_apply produced a negative energy");
      v = 0.0;
    }
  }
  return out;
}

void DyadicTime::validate(int viscous_scale) const {
  if (integer_part < 0) throw std::domain_error("dyadic time: m must be >= 0");
  int prev = 0;
  for (int i : indices) {
    if (i <= prev) throw std::domain_error("dyadic time: indices must be strictly increasing and > 0");
    if (i > viscous_scale) throw std::domain_error("dyadic time: index exceeds viscous scale");
    prev = i;
  }
}

double DyadicTime::as_double() const {
  double t = integer_part;
  for (int i : indices) t += std::ldexp(1.0, -i);
  return t;
}

std::uint64_t DyadicTime::fine_ticks(int viscous_scale) const {
  std::uint64_t k = static_cast<std::uint64_t>(integer_part) << viscous_scale;
  for (int i : indices) k += std::uint64_t{1} << (viscous_scale - i);
  return k;
}

std::vector<double> state_at_dyadic_time(std::span<const double> a, int viscous_scale,
                                         double alpha, const TransferSpec& spec,
                                         const DyadicTime& t, int n_cap) {
  t.validate(viscous_scale);
  const Dissipation d = Dissipation::deterministic(alpha);

  std::vector<double> b(a.begin(), a.end());
  b.resize(static_cast<std::size_t>(n_cap) + 1, 0.0);

  const FlowMap whole(viscous_scale, d, spec, n_cap);
  for (int m = 0; m < t.integer_part; ++m) b = whole(b);

  int prev_index = 0;
  for (int ij : t.indices) {
    const int delta = ij - prev_index;
    std::vector<double> shifted = b;
    for (int s = 0; s < delta - 1; ++s) shifted = shift_plus(shifted);
    std::vector<double> head = xi_transfer(shifted, spec);
    const FlowMap part(viscous_scale - ij, d, spec, n_cap);
    std::vector<double> tail = part(shift_plus(shifted));
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i] += head[i];
    b = std::move(tail);
    prev_index = ij;
  }
  return b;
}

}  // namespace rglat
