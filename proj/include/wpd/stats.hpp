#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpd {

/// Equal-width histogram, probabilities normalized by the sample count.
struct Histogram {
  std::vector<double> bin_edges;
  std::vector<double> probs;

  std::size_t bins() const { return probs.size(); }
};

inline std::size_t default_bin_count(std::size_t samples) {
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples)))));
}

inline Histogram histogram(std::span<const double> data, std::size_t n_bins) {
  if (data.empty()) throw std::invalid_argument("histogram: empty data");
  if (n_bins < 2) throw std::invalid_argument("histogram: need at least 2 bins");
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double lo = *lo_it;
  double hi = *hi_it;
  if (hi - lo <= 0.0) hi = lo + 1e-12;
  const double width = (hi - lo) / static_cast<double>(n_bins);

  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
  h.bin_edges.back() = hi;

  std::vector<std::size_t> counts(n_bins, 0);
  for (double x : data) {
    auto i = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(i, n_bins - 1)];
  }
  h.probs.resize(n_bins);
  const auto M = static_cast<double>(data.size());
  for (std::size_t i = 0; i < n_bins; ++i) h.probs[i] = static_cast<double>(counts[i]) / M;
  return h;
}

/// KL(p || q) = sum p_i ln(p_i / q_i). Requires identical bins and q_i = 0 => p_i = 0.
inline double kl_divergence(const Histogram& p, const Histogram& q) {
  if (p.bin_edges != q.bin_edges || p.probs.size() != q.probs.size())
    throw std::invalid_argument("kl_divergence: histograms have different bins");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) {
    if (p.probs[i] == 0.0) continue;
    if (q.probs[i] == 0.0)
      throw std::domain_error("kl_divergence: q is zero where p is not (bin " +
                              std::to_string(i) + ")");
    kl += p.probs[i] * std::log(p.probs[i] / q.probs[i]);
  }
  return std::max(kl, 0.0);
}

inline double skl_divergence(const Histogram& p, const Histogram& q) {
  return 0.5 * (kl_divergence(p, q) + kl_divergence(q, p));
}

enum class PdfKind { kErlang2, kGaussian, kStudentT };

inline const char* to_string(PdfKind k) {
  switch (k) {
    case PdfKind::kErlang2: return "erlang2";
    case PdfKind::kGaussian: return "gaussian";
    case PdfKind::kStudentT: return "studentt";
  }
  return "?";
}

/// `scale` is the variance σ² for Erlang-2 and Gaussian, and the squared scale
/// s² for Student-t. `dof` is only used by Student-t.
struct PdfModel {
  PdfKind kind = PdfKind::kErlang2;
  double scale = 1.0;
  double dof = 1.0;
};

/// Erlang-2 rate for a given variance: λ = sqrt(2 / σ²).
inline double erlang2_rate(double variance) { return std::sqrt(2.0 / variance); }

inline double log_pdf(const PdfModel& m, double x) {
  if (!(m.scale > 0.0) || !std::isfinite(m.scale))
    throw std::invalid_argument("pdf: scale must be finite and positive");
  switch (m.kind) {
    case PdfKind::kErlang2: {
      if (x <= 0.0) return -std::numeric_limits<double>::infinity();
      const double rate = erlang2_rate(m.scale);
      return 2.0 * std::log(rate) + std::log(x) - rate * x;
    }
    case PdfKind::kGaussian:
      return -0.5 * std::log(2.0 * std::numbers::pi * m.scale) - 0.5 * x * x / m.scale;
    case PdfKind::kStudentT: {
      if (!(m.dof > 0.0)) throw std::invalid_argument("pdf: Student-t dof must be positive");
      const double nu = m.dof;
      return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
             0.5 * std::log(nu * std::numbers::pi * m.scale) -
             0.5 * (nu + 1.0) * std::log1p(x * x / (nu * m.scale));
    }
  }
  return -std::numeric_limits<double>::infinity();
}

inline double pdf_eval(const PdfModel& m, double x) { return std::exp(log_pdf(m, x)); }

inline double log_likelihood(const PdfModel& m, std::span<const double> data) {
  double ll = 0.0;
  for (double x : data) ll += log_pdf(m, x);
  return ll;
}

inline int free_parameters(PdfKind k) { return k == PdfKind::kStudentT ? 2 : 1; }

struct AicResult {
  PdfModel fitted;
  double aic = 0.0;
  double log_likelihood = 0.0;
  std::size_t clamped = 0;  // Erlang-2 inputs raised to the positive floor
};

namespace detail {

inline constexpr double kErlangFloor = 1e-12;
inline constexpr double kScaleFloor = 1e-300;

// Profile likelihood of Student-t at fixed dof; scale solved by the EM fixed point
//   s² <- mean( (ν + 1) x² / (ν + x² / s²) ).
inline PdfModel fit_student_scale(std::span<const double> data, double nu) {
  double ms = 0.0;
  for (double x : data) ms += x * x;
  ms /= static_cast<double>(data.size());
  double s2 = std::max(ms, kScaleFloor);
  for (int it = 0; it < 500; ++it) {
    double acc = 0.0;
    for (double x : data) acc += (nu + 1.0) * x * x / (nu + x * x / s2);
    const double next = std::max(acc / static_cast<double>(data.size()), kScaleFloor);
    const bool done = std::abs(next - s2) <= 1e-12 * s2;
    s2 = next;
    if (done) break;
  }
  return {PdfKind::kStudentT, s2, nu};
}

inline PdfModel fit_student(std::span<const double> data) {
  auto profile = [&](double nu) {
    PdfModel m = fit_student_scale(data, nu);
    return std::pair{m, log_likelihood(m, data)};
  };
  double best_nu = 1.0;
  auto best = profile(1.0);
  for (int nu = 2; nu <= 30; ++nu) {
    auto cand = profile(nu);
    if (cand.second > best.second) {
      best = cand;
      best_nu = nu;
    }
  }
  // Golden-section refinement of ν around the best grid point.
  double a = std::max(1.0, best_nu - 1.0), b = std::min(30.0, best_nu + 1.0);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  auto fc = profile(c), fd = profile(d);
  for (int it = 0; it < 40 && b - a > 1e-6; ++it) {
    if (fc.second > fd.second) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = profile(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = profile(d);
    }
  }
  for (const auto& cand : {fc, fd})
    if (cand.second > best.second) best = cand;
  return best.first;
}

}  // namespace detail

/// Maximum-likelihood fit of `kind` to `data` and its Akaike information
/// criterion 2k - 2 ln L. Lower is a better fit.
inline AicResult aic_index(std::span<const double> data, PdfKind kind) {
  if (data.empty()) throw std::invalid_argument("aic_index: empty data");
  AicResult r;
  const auto n = static_cast<double>(data.size());
  switch (kind) {
    case PdfKind::kErlang2: {
      std::vector<double> pos(data.begin(), data.end());
      double sum = 0.0;
      for (double& x : pos) {
        if (x < detail::kErlangFloor) {
          x = detail::kErlangFloor;
          ++r.clamped;
        }
        sum += x;
      }
      // Shape-2 gamma MLE with known shape: rate = 2 / mean, so σ² = mean² / 2.
      const double mean = sum / n;
      r.fitted = {PdfKind::kErlang2, 0.5 * mean * mean, 0.0};
      r.log_likelihood = log_likelihood(r.fitted, pos);
      break;
    }
    case PdfKind::kGaussian: {
      double ms = 0.0;
      for (double x : data) ms += x * x;
      r.fitted = {PdfKind::kGaussian, std::max(ms / n, detail::kScaleFloor), 0.0};
      r.log_likelihood = log_likelihood(r.fitted, data);
      break;
    }
    case PdfKind::kStudentT:
      r.fitted = detail::fit_student(data);
      r.log_likelihood = log_likelihood(r.fitted, data);
      break;
  }
  r.aic = 2.0 * free_parameters(kind) - 2.0 * r.log_likelihood;
  return r;
}

}  // namespace wpd
