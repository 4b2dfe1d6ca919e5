#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "rglat/lattice.hpp"
#include "rglat/transfer.hpp"

namespace rglat {

// Primitive maps of the renormalization algebra. All of them act on vectors
// of a fixed length n_cap + 1: sigma_+ drops component 0 and appends a zero,
// sigma_- prepends a zero and drops the last component.
std::vector<double> shift_plus(std::span<const double> a);
std::vector<double> shift_minus(std::span<const double> a);
std::vector<double> project_zero(std::span<const double> a);

// xi(a) = (f(a0, a1) * a0, 0, 0, ...): the energy handed from the largest
// scale to the next one over half a turnover.
std::vector<double> xi_transfer(std::span<const double> a, const TransferSpec& spec);

// An evaluable flow map a -> u(1). Either a simulator with deterministic
// dissipation, or R^d applied to one. Composites evaluate by recursive
// application of the RG operator, so R^d[simulator(N)] agrees with
// simulator(N + d) only through the renormalization identity -- that identity
// is what the tests check.
class FlowMap {
 public:
  FlowMap(int viscous_scale, Dissipation dissipation, TransferSpec transfer,
          int n_cap);

  static FlowMap rg_composite(const FlowMap& base, int depth);

  std::vector<double> operator()(std::span<const double> a) const;

  const TransferSpec& transfer() const { return transfer_; }
  int n_cap() const { return n_cap_; }
  int sim_scale() const { return sim_scale_; }
  int rg_depth() const { return rg_depth_; }

 private:
  TransferSpec transfer_;
  Dissipation dissipation_;
  int sim_scale_;
  int n_cap_;
  int rg_depth_ = 0;
};

// The RG operator applied pointwise:
//   R[phi](a) = pi_0(a) - xi(a) + sigma_-( phi( xi(a) + phi(sigma_+(a)) ) ).
// Component 0 of the result is always (1 - f(a0, a1)) * a0. Values in
// [-1e-14, 0) from the subtraction are clamped to 0; anything more negative
// is a fault.
std::vector<double> rg_apply(const FlowMap& phi, std::span<const double> a);

// t = m + 2^-i1 + ... + 2^-ik with 0 < i1 < ... < ik <= N.
struct DyadicTime {
  int integer_part = 0;
  std::vector<int> indices;

  void validate(int viscous_scale) const;
  double as_double() const;
  std::uint64_t fine_ticks(int viscous_scale) const;
};

// All solution components from scale ik on, at dyadic time t, obtained by
// composing flow maps of decreasing viscous scale:
//   (u_ik(t), u_ik+1(t), ...) = Psi_k o ... o Psi_1 o phi^m (a),
//   Psi_j = xi o sigma_+^{di_j - 1} + phi^(N - i_j) o sigma_+^{di_j}.
// Entry r of the result is scale ik + r.
std::vector<double> state_at_dyadic_time(std::span<const double> a, int viscous_scale,
                                         double alpha, const TransferSpec& spec,
                                         const DyadicTime& t, int n_cap);

}  // namespace rglat
