#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wpd/noise_tracker.hpp"
#include "wpd/teager.hpp"

// Speech presence estimation driving the shrinkage shape parameter:
//   a-priori SNR recursion  xi(k,m) = kappa xi(k,m-1) + (1 - kappa) eta(k,m-1)
//   local/global presence   r_tau from rectangular averages of xi across subbands
//   subband presence        r_subband from the frame-mean xi and a confined peak
//   absence probability     q = 1 - r_local r_global r_subband
//   shape parameter         alpha = (1 + r) / (2 (1 + q)),  r = 1 - q

namespace wpd {

inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }

enum class XiRecursion {
  kCoefficient,  // recursion over coefficient index within a frame, carried across frames
  kFrame,        // recursion over frames on the subband-mean posterior SNR
};

struct PresenceConfig {
  double kappa = 0.7;
  double xi_min_db = -10.0;
  double xi_max_db = -5.0;
  double xi_peak_db = 10.0;
  std::size_t w_local = 1;
  std::size_t w_global = 15;
  XiRecursion recursion = XiRecursion::kCoefficient;

  double xi_min() const { return db_to_power(xi_min_db); }
  double xi_max() const { return db_to_power(xi_max_db); }
  double xi_peak_cap() const { return db_to_power(xi_peak_db); }
};

enum class PresenceWindow { kLocal, kGlobal };

struct PresenceState {
  PresenceConfig cfg;
  std::vector<std::vector<double>> xi;
  std::vector<double> xi_prev_frame;
  std::vector<double> xi_subband;
  std::vector<double> r_subband;
  double xi_peak = 0.0;

  std::size_t size() const { return xi.size(); }
};

inline PresenceState make_presence_state(std::size_t subbands, const PresenceConfig& cfg = {}) {
  PresenceState s;
  s.cfg = cfg;
  s.xi.resize(subbands);
  s.xi_prev_frame.assign(subbands, cfg.xi_min());
  s.xi_subband.assign(subbands, 0.0);
  s.r_subband.assign(subbands, 0.0);
  s.xi_peak = cfg.xi_min();
  return s;
}

/// max(posterior SNR - 1, 0) of one TE value against the TE-domain noise power.
inline double instantaneous_snr(double te_value, double noise_power) {
  return std::max(std::max(te_value, 0.0) / std::max(noise_power, kPowerFloor) - 1.0, 0.0);
}

/// Runs the a-priori SNR recursion over one frame.
inline PresenceState xi_recursion(PresenceState state, const TeCoeffs& te,
                                  const NoiseState& noise) {
  if (te.size() != state.size() || noise.size() != state.size())
    throw std::invalid_argument("presence: subband count mismatch");
  const double kappa = state.cfg.kappa;
  for (std::size_t k = 0; k < state.size(); ++k) {
    const auto& t = te.values[k];
    auto& xi = state.xi[k];
    xi.assign(t.size(), 0.0);
    if (t.empty()) continue;
    const double sn2 = noise.sigma_n2[k];
    auto eta = [sn2](double v) { return instantaneous_snr(v, sn2); };
    if (state.cfg.recursion == XiRecursion::kFrame) {
      double mean_eta = 0.0;
      for (double v : t) mean_eta += eta(v);
      mean_eta /= static_cast<double>(t.size());
      const double next = kappa * state.xi_prev_frame[k] + (1.0 - kappa) * mean_eta;
      std::fill(xi.begin(), xi.end(), next);
      state.xi_prev_frame[k] = next;
      continue;
    }
    xi[0] = state.xi_prev_frame[k];
    for (std::size_t m = 1; m < t.size(); ++m)
      xi[m] = kappa * xi[m - 1] + (1.0 - kappa) * eta(t[m - 1]);
    // Seed for the next frame: the recursion continued one step past the end.
    state.xi_prev_frame[k] = kappa * xi.back() + (1.0 - kappa) * eta(t.back());
  }
  return state;
}

/// Maps a log-domain ratio to [0, 1]: 0 at or below `lo`, 1 at or above `hi`.
inline double log_ramp(double value, double lo, double hi) {
  if (value <= lo) return 0.0;
  if (value >= hi) return 1.0;
  return std::log(value / lo) / std::log(hi / lo);
}

/// Rectangular average of xi across neighbouring subbands at the same time
/// position, truncated at the band edges and renormalized. Subbands with a
/// different coefficient count are sampled at the time-aligned index.
inline double xi_window_mean(const PresenceState& state, std::size_t k, std::size_t m,
                             std::size_t half_width) {
  const std::size_t K = state.size();
  const std::size_t first = k > half_width ? k - half_width : 0;
  const std::size_t last = std::min(K - 1, k + half_width);
  const auto Mk = static_cast<double>(state.xi[k].size());
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t j = first; j <= last; ++j) {
    const auto& row = state.xi[j];
    if (row.empty()) continue;
    std::size_t mj = m;
    if (row.size() != state.xi[k].size())
      mj = std::min(row.size() - 1, static_cast<std::size_t>((static_cast<double>(m) + 0.5) *
                                                             static_cast<double>(row.size()) / Mk));
    acc += row[mj];
    ++used;
  }
  return used ? acc / static_cast<double>(used) : 0.0;
}

inline double r_tau(const PresenceState& state, std::size_t k, std::size_t m,
                    PresenceWindow tau) {
  const std::size_t w = tau == PresenceWindow::kLocal ? state.cfg.w_local : state.cfg.w_global;
  return log_ramp(xi_window_mean(state, k, m, w), state.cfg.xi_min(), state.cfg.xi_max());
}

/// Presence relative to the confined peak: the log ramp of xi_subband / xi_peak.
inline double subband_peak_presence(double xi_subband, double xi_peak, double xi_min,
                                    double xi_max) {
  return log_ramp(xi_subband / xi_peak, xi_min, xi_max);
}

/// Computes the frame-mean xi of every subband, advances the confined peak and
/// stores the per-subband presence probability.
inline PresenceState update_subband_presence(PresenceState state) {
  const std::size_t K = state.size();
  const double xi_min = state.cfg.xi_min();
  const double xi_max = state.cfg.xi_max();
  state.xi_subband.assign(K, 0.0);
  state.r_subband.assign(K, 0.0);
  double frame_max = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& xi = state.xi[k];
    double acc = 0.0;
    for (double v : xi) acc += v;
    state.xi_subband[k] = xi.empty() ? 0.0 : acc / static_cast<double>(xi.size());
    frame_max = std::max(frame_max, state.xi_subband[k]);
  }
  state.xi_peak = std::clamp(std::max(state.xi_peak, frame_max), xi_min, state.cfg.xi_peak_cap());

  for (std::size_t k = 0; k < K; ++k) {
    const double cur = state.xi_subband[k];
    const double prev = state.xi_subband[k == 0 ? 0 : k - 1];
    if (cur < xi_min) {
      state.r_subband[k] = 0.0;
    } else if (cur > xi_min && (k == 0 || cur > prev)) {
      state.r_subband[k] = 1.0;
    } else {
      state.r_subband[k] = subband_peak_presence(cur, state.xi_peak, xi_min, xi_max);
    }
  }
  return state;
}

inline double r_subband(const PresenceState& state, std::size_t k) { return state.r_subband[k]; }

inline double speech_absence(double r_local, double r_global, double r_sub) {
  return std::clamp(1.0 - r_local * r_global * r_sub, 0.0, 1.0);
}

inline double alpha_from_absence(double q) {
  const double r = 1.0 - q;
  return (1.0 + r) / (2.0 * (1.0 + q));
}

inline double shape_alpha(const PresenceState& state, std::size_t k, std::size_t m) {
  const double q = speech_absence(r_tau(state, k, m, PresenceWindow::kLocal),
                                  r_tau(state, k, m, PresenceWindow::kGlobal),
                                  r_subband(state, k));
  return alpha_from_absence(q);
}

}  // namespace wpd
