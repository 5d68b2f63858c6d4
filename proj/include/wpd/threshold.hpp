#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wpd/noise_tracker.hpp"
#include "wpd/pwpt.hpp"
#include "wpd/teager.hpp"

namespace wpd {

namespace detail {

inline void require_positive(double sigma_n2, double gamma) {
  if (!(sigma_n2 > 0.0) || !(gamma > 0.0))
    throw std::invalid_argument("threshold: noise power and SNR must be positive");
}

}  // namespace detail

/// Erlang-2 threshold: sqrt(σn²) γ ln γ / (sqrt(γ) - 1), with the removable
/// singularity at γ = 1 filled by its limit 2 sqrt(σn²).
inline double lambda_erlang(double sigma_n2, double gamma) {
  detail::require_positive(sigma_n2, gamma);
  const double sigma = std::sqrt(sigma_n2);
  if (gamma == 1.0) return 2.0 * sigma;
  // ln γ / (sqrt(γ) - 1) = 2 ln(u) / (u - 1), u = sqrt(γ), with u - 1 formed
  // without cancellation.
  const double e = gamma - 1.0;
  const double u_minus_1 = e / (std::sqrt(gamma) + 1.0);
  return sigma * gamma * std::log1p(e) / u_minus_1;
}

/// Gaussian-model threshold: sqrt(σn²) sqrt(2(γ + γ²)) ln sqrt(1 + 1/γ).
inline double lambda_gaussian(double sigma_n2, double gamma) {
  detail::require_positive(sigma_n2, gamma);
  return std::sqrt(sigma_n2) * std::sqrt(2.0 * (gamma + gamma * gamma)) * 0.5 *
         std::log1p(1.0 / gamma);
}

/// Student-t threshold, evaluated as printed:
///   sqrt( σn² (1 + γ) / ((sqrt(1 + γ) + 2 + γ) sqrt(χ²)) ).
inline double lambda_student(double sigma_n2, double gamma, double chi2 = 0.5) {
  detail::require_positive(sigma_n2, gamma);
  if (!(chi2 > 0.0)) throw std::invalid_argument("threshold: chi2 must be positive");
  return std::sqrt(sigma_n2 * (1.0 + gamma) /
                   ((std::sqrt(1.0 + gamma) + 2.0 + gamma) * std::sqrt(chi2 * chi2)));
}

enum class VarianceDomain { kPwp, kTe };

// SNR argument passed to lambda_erlang by compute_spec.
enum class ThresholdSnr {
  kPosterior,  // γ_k = signal power / noise power
  kInverse,    // 1 / γ_k, capped at 1: the threshold falls as the subband SNR rises
};

inline constexpr double kGammaFloor = 1e-6;
inline constexpr double kGammaCap = 1e6;

struct ThresholdSpec {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<double> gamma;
  double chi2 = 0.5;
};

/// Per-subband thresholds λ1 (Erlang-2) and λ2 = 2 λ1. A subband whose noise
/// estimate sits at the power floor gets λ1 = 0, i.e. no shrinkage.
inline ThresholdSpec compute_spec(const NoiseState& noise, const SubbandSet& sb,
                                  VarianceDomain domain = VarianceDomain::kPwp,
                                  ThresholdSnr snr = ThresholdSnr::kPosterior) {
  if (noise.size() != sb.size()) throw std::invalid_argument("threshold: subband count mismatch");
  const std::size_t K = sb.size();
  ThresholdSpec spec;
  spec.lambda1.assign(K, 0.0);
  spec.lambda2.assign(K, 0.0);
  spec.gamma.assign(K, kGammaFloor);
  TeCoeffs te;
  if (domain == VarianceDomain::kTe) te = te_operator(sb);
  for (std::size_t k = 0; k < K; ++k) {
    const double sn2 = domain == VarianceDomain::kPwp ? noise.sigma_n2_pwp[k] : noise.sigma_n2[k];
    const double signal =
        domain == VarianceDomain::kPwp ? mean_square(sb.coeffs[k]) : te_power(te.values[k]);
    spec.gamma[k] = std::clamp(signal / std::max(sn2, kPowerFloor), kGammaFloor, kGammaCap);
    if (sn2 <= kPowerFloor) continue;
    const double g = snr == ThresholdSnr::kPosterior
                         ? spec.gamma[k]
                         : std::clamp(1.0 / spec.gamma[k], kGammaFloor, 1.0);
    spec.lambda1[k] = lambda_erlang(sn2, g);
    spec.lambda2[k] = 2.0 * spec.lambda1[k];
  }
  return spec;
}

}  // namespace wpd
