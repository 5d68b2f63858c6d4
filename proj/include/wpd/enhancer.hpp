#pragma once

#include <functional>
#include <iostream>
#include <string>
#include <string_view>
#include <vector>

#include "wpd/audio_io.hpp"
#include "wpd/config.hpp"
#include "wpd/framing.hpp"
#include "wpd/noise_tracker.hpp"
#include "wpd/presence.hpp"
#include "wpd/pwpt.hpp"
#include "wpd/shrink.hpp"
#include "wpd/teager.hpp"
#include "wpd/threshold.hpp"

namespace wpd {

struct FrameResult {
  std::vector<double> frame;
  NoiseState noise;
  PresenceState presence;
};

/// One frame through the pipeline:
/// analyze -> TE -> noise update -> xi recursion -> thresholds -> shrink -> synthesize.
inline FrameResult enhance_frame(const std::vector<double>& frame, NoiseState noise,
                                 PresenceState presence, const EnhanceConfig& cfg,
                                 const WaveletFilters& filters) {
  SubbandSet sb = analyze(frame, cfg.tree, filters);
  const TeCoeffs te = te_operator(sb);
  noise = update(std::move(noise), te, sb, cfg.noise);
  presence = xi_recursion(std::move(presence), te, noise);
  presence = update_subband_presence(std::move(presence));
  const ThresholdSpec spec = compute_spec(noise, sb, cfg.domain, cfg.threshold_snr);

  for (std::size_t k = 0; k < sb.size(); ++k) {
    auto& band = sb.coeffs[k];
    for (std::size_t m = 0; m < band.size(); ++m) {
      const double alpha = cfg.shrink.alpha_mode == AlphaMode::kFixed
                               ? cfg.shrink.fixed_alpha
                               : shape_alpha(presence, k, m);
      band[m] = apply_shrink(band[m], spec.lambda1[k], spec.lambda2[k], alpha, cfg.shrink.mu);
    }
  }
  return {synthesize(sb, filters), std::move(noise), std::move(presence)};
}

using WarningSink = std::function<void(std::string_view)>;

inline void warn_to_stderr(std::string_view msg) { std::cerr << "warning: " << msg << '\n'; }

/// Noise state seeded from known noise and frozen.
inline NoiseState oracle_noise_state(const AudioBuffer& noise, const EnhanceConfig& cfg,
                                     const WaveletFilters& filters) {
  const FrameStack st = split_frames(noise, cfg.frame_len);
  std::vector<SubbandSet> frames;
  frames.reserve(st.frames.size());
  for (const auto& f : st.frames) frames.push_back(analyze(f, cfg.tree, filters));
  return set_oracle(make_noise_state(cfg.tree.size()), frames);
}

namespace detail {

inline AudioBuffer run_stream(const AudioBuffer& noisy, NoiseState noise, const EnhanceConfig& cfg,
                              const WaveletFilters& filters, const WarningSink& warn) {
  if (warn && noisy.sample_rate_hz != 8000)
    warn("sample rate " + std::to_string(noisy.sample_rate_hz) +
         " Hz differs from the 8000 Hz the default subband tree is laid out for");
  FrameStack st = split_frames(noisy, cfg.frame_len);
  PresenceState presence = make_presence_state(cfg.tree.size(), cfg.presence);
  for (auto& frame : st.frames) {
    FrameResult r = enhance_frame(frame, std::move(noise), std::move(presence), cfg, filters);
    frame = std::move(r.frame);
    noise = std::move(r.noise);
    presence = std::move(r.presence);
  }
  return overlap_add(st);
}

}  // namespace detail

/// Frames, enhances every frame in order with the adaptive noise tracker, and
/// overlap-adds. Output length equals input length.
inline AudioBuffer enhance_stream(const AudioBuffer& noisy, const EnhanceConfig& cfg,
                                  const WarningSink& warn = warn_to_stderr) {
  validate_config(cfg);
  const WaveletFilters filters = db10_filters();
  return detail::run_stream(noisy, make_noise_state(cfg.tree.size()), cfg, filters, warn);
}

/// As above, with noise powers fixed to those of `noise_oracle`.
inline AudioBuffer enhance_stream(const AudioBuffer& noisy, const AudioBuffer& noise_oracle,
                                  const EnhanceConfig& cfg,
                                  const WarningSink& warn = warn_to_stderr) {
  validate_config(cfg);
  const WaveletFilters filters = db10_filters();
  return detail::run_stream(noisy, oracle_noise_state(noise_oracle, cfg, filters), cfg, filters,
                            warn);
}

}  // namespace wpd
