#pragma once

#include <cmath>
#include <stdexcept>

namespace wpd {

enum class AlphaMode { kDynamic, kFixed };

struct ShrinkConfig {
  double mu = 0.9;
  AlphaMode alpha_mode = AlphaMode::kDynamic;
  double fixed_alpha = 0.5;
};

namespace detail {

inline double sgn(double y) { return (y > 0.0) - (y < 0.0); }

// (|y| / mu) ((1 + mu)^(|y| / lambda1) - 1)
inline double mu_law_magnitude(double abs_y, double lambda1, double mu) {
  return abs_y / mu * std::expm1(abs_y / lambda1 * std::log1p(mu));
}

inline void check_thresholds(double lambda1, double lambda2) {
  if (lambda1 < 0.0 || (lambda1 > 0.0 && !(lambda2 > lambda1)))
    throw std::invalid_argument("shrink: thresholds must satisfy 0 < lambda1 < lambda2");
}

}  // namespace detail

/// Blend of mu-law and semisoft shrinkage:
///   |Y| <= λ1:      α sgn(Y) (|Y|/μ) ((1+μ)^(|Y|/λ1) - 1)
///   |Y| >= λ2:      Y
///   otherwise:      (1-α) sgn(Y) λ2 (|Y|-λ1)/(λ2-λ1) + α Y
/// λ1 = 0 disables shrinkage.
inline double apply_shrink(double y, double lambda1, double lambda2, double alpha, double mu) {
  detail::check_thresholds(lambda1, lambda2);
  if (lambda1 == 0.0) return y;
  const double a = std::abs(y);
  if (a <= lambda1) return alpha * detail::sgn(y) * detail::mu_law_magnitude(a, lambda1, mu);
  if (a >= lambda2) return y;
  const double ramp = detail::sgn(y) * lambda2 * (a - lambda1) / (lambda2 - lambda1);
  return (1.0 - alpha) * ramp + alpha * y;
}

/// Semisoft shrinkage: zero below λ1, linear ramp to λ2, identity above.
inline double semisoft(double y, double lambda1, double lambda2) {
  detail::check_thresholds(lambda1, lambda2);
  const double a = std::abs(y);
  if (a <= lambda1) return 0.0;
  if (a >= lambda2) return y;
  return detail::sgn(y) * lambda2 * (a - lambda1) / (lambda2 - lambda1);
}

/// mu-law shrinkage: companded below λ, identity above.
inline double mu_law(double y, double lambda, double mu) {
  if (!(lambda > 0.0)) throw std::invalid_argument("mu_law: lambda must be positive");
  const double a = std::abs(y);
  if (a > lambda) return y;
  return detail::sgn(y) * detail::mu_law_magnitude(a, lambda, mu);
}

}  // namespace wpd
