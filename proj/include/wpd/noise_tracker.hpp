#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <vector>

#include "wpd/pwpt.hpp"
#include "wpd/teager.hpp"

// Per-subband noise power tracking: first-order recursive smoothing of the
// frame power, followed by a bias-compensated minimum over the last few
// smoothed values. Both TE-domain and PWP-domain powers are tracked.

namespace wpd {

inline constexpr double kPowerFloor = 1e-12;

struct NoiseTrackerConfig {
  double smoothing = 0.85;         // a_s
  std::size_t minima_window = 8;   // D, in frames
  double minima_bias = 1.5;        // b_min
  std::size_t bootstrap_frames = 3;
};

struct NoiseState {
  std::vector<double> sigma_n2;      // TE domain
  std::vector<double> sigma_n2_pwp;  // PWP coefficient domain
  std::vector<double> smoothed_power;
  std::vector<double> smoothed_power_pwp;
  std::vector<std::deque<double>> minima_window;
  std::vector<std::deque<double>> minima_window_pwp;
  std::size_t frame_count = 0;
  bool oracle = false;

  std::size_t size() const { return sigma_n2.size(); }
};

inline NoiseState make_noise_state(std::size_t subbands) {
  NoiseState s;
  s.sigma_n2.assign(subbands, kPowerFloor);
  s.sigma_n2_pwp.assign(subbands, kPowerFloor);
  s.smoothed_power.assign(subbands, kPowerFloor);
  s.smoothed_power_pwp.assign(subbands, kPowerFloor);
  s.minima_window.resize(subbands);
  s.minima_window_pwp.resize(subbands);
  return s;
}

/// Mean of max(t, 0): TE values can dip below zero pointwise but model power here.
inline double te_power(const std::vector<double>& t) {
  if (t.empty()) return 0.0;
  double acc = 0.0;
  for (double v : t) acc += std::max(v, 0.0);
  return acc / static_cast<double>(t.size());
}

inline double mean_square(const std::vector<double>& w) {
  if (w.empty()) return 0.0;
  double acc = 0.0;
  for (double v : w) acc += v * v;
  return acc / static_cast<double>(w.size());
}

namespace detail {

inline double track(double frame_power, double& smoothed, std::deque<double>& window,
                    std::size_t frame_index, const NoiseTrackerConfig& cfg) {
  smoothed = frame_index == 0 ? frame_power
                              : cfg.smoothing * smoothed + (1.0 - cfg.smoothing) * frame_power;
  smoothed = std::max(smoothed, kPowerFloor);
  window.push_back(smoothed);
  while (window.size() > std::max<std::size_t>(cfg.minima_window, 1)) window.pop_front();
  if (frame_index < cfg.bootstrap_frames) return smoothed;
  const double lowest = *std::min_element(window.begin(), window.end());
  // A floored minimum means no measurable noise; keep it at the floor exactly.
  return lowest <= kPowerFloor ? kPowerFloor : std::max(cfg.minima_bias * lowest, kPowerFloor);
}

}  // namespace detail

/// Advances the tracker by one frame. A state in oracle mode is returned unchanged.
inline NoiseState update(NoiseState state, const TeCoeffs& te, const SubbandSet& sb,
                         const NoiseTrackerConfig& cfg = {}) {
  if (state.oracle) return state;
  if (te.size() != state.size() || sb.size() != state.size())
    throw std::invalid_argument("noise tracker: subband count mismatch");
  for (std::size_t k = 0; k < state.size(); ++k) {
    state.sigma_n2[k] = detail::track(te_power(te.values[k]), state.smoothed_power[k],
                                      state.minima_window[k], state.frame_count, cfg);
    state.sigma_n2_pwp[k] =
        detail::track(mean_square(sb.coeffs[k]), state.smoothed_power_pwp[k],
                      state.minima_window_pwp[k], state.frame_count, cfg);
  }
  ++state.frame_count;
  return state;
}

/// Replaces the estimates with the exact per-subband powers of known noise
/// frames and freezes the tracker.
inline NoiseState set_oracle(NoiseState state, const std::vector<SubbandSet>& noise_frames) {
  if (noise_frames.empty()) throw std::invalid_argument("set_oracle: no noise frames");
  const std::size_t K = noise_frames.front().size();
  std::vector<double> te_acc(K, 0.0), pwp_acc(K, 0.0), count(K, 0.0);
  for (const auto& sb : noise_frames) {
    if (sb.size() != K) throw std::invalid_argument("set_oracle: inconsistent subband count");
    const TeCoeffs te = te_operator(sb);
    for (std::size_t k = 0; k < K; ++k) {
      const auto m = static_cast<double>(sb.coeffs[k].size());
      te_acc[k] += te_power(te.values[k]) * m;
      pwp_acc[k] += mean_square(sb.coeffs[k]) * m;
      count[k] += m;
    }
  }
  if (state.size() != K) state = make_noise_state(K);
  for (std::size_t k = 0; k < K; ++k) {
    state.sigma_n2[k] = std::max(te_acc[k] / std::max(count[k], 1.0), kPowerFloor);
    state.sigma_n2_pwp[k] = std::max(pwp_acc[k] / std::max(count[k], 1.0), kPowerFloor);
    state.smoothed_power[k] = state.sigma_n2[k];
    state.smoothed_power_pwp[k] = state.sigma_n2_pwp[k];
  }
  state.oracle = true;
  return state;
}

}  // namespace wpd
