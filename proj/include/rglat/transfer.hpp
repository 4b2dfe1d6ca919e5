#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace rglat {

// Two parametrized families of transfer fractions f(u, v): the share of
// energy a scale hands to the next-smaller scale per turnover, as a function
// of its own state u and the adjacent smaller-scale state v.
enum class TransferFamily { FA, FB };

struct TransferSpec {
  TransferFamily family = TransferFamily::FA;
  double p = 5.0;

  // FA: 0.3 - 0.1 cos(p e^{-u/v}),        range [0.2, 0.4]
  // FB: 0.4 - 0.3 cos(p e^{-u/v} - p/2),  range [0.1, 0.7]
  // The v = 0 branch equals the u/v -> infinity limit of the v > 0 branch.
  double fraction(double u, double v) const {
    if (!(u >= 0.0) || !(v >= 0.0) || !std::isfinite(u) || !std::isfinite(v))
      throw std::domain_error("transfer fraction: arguments must be finite and >= 0");
    if (family == TransferFamily::FA) {
      if (v > 0.0) return 0.3 - 0.1 * std::cos(p * std::exp(-u / v));
      return 0.2;
    }
    if (v > 0.0) return 0.4 - 0.3 * std::cos(p * std::exp(-u / v) - 0.5 * p);
    return 0.4 - 0.3 * std::cos(0.5 * p);
  }
};

inline const char* family_name(TransferFamily f) {
  return f == TransferFamily::FA ? "FA" : "FB";
}

inline TransferFamily family_from_name(const std::string& s) {
  if (s == "FA" || s == "fa") return TransferFamily::FA;
  if (s == "FB" || s == "fb") return TransferFamily::FB;
  throw std::invalid_argument("unknown transfer family: " + s);
}

}  // namespace rglat
