#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wpd/audio_io.hpp"

namespace wpd {

/// Periodic (DFT-even) Hamming window: sums to the constant 1.08 at 50% overlap.
inline std::vector<double> periodic_hamming(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t n = 0; n < len; ++n)
    w[n] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                  static_cast<double>(len));
  return w;
}

struct FrameStack {
  std::vector<std::vector<double>> frames;
  std::size_t hop = 0;
  std::vector<double> window;
  std::size_t original_len = 0;
  int sample_rate_hz = 8000;

  std::size_t frame_len() const { return window.size(); }
};

inline std::size_t frame_count(std::size_t signal_len, std::size_t frame_len) {
  const std::size_t hop = frame_len / 2;
  const std::size_t excess = signal_len > frame_len ? signal_len - frame_len : 0;
  return (excess + hop - 1) / hop + 1;
}

/// Hamming-windowed frames at 50% overlap; the tail is zero-padded.
inline FrameStack split_frames(const AudioBuffer& buf, std::size_t frame_len) {
  if (frame_len < 4 || frame_len % 2 != 0)
    throw std::invalid_argument("frame length must be even and at least 4");
  if (buf.samples.empty()) throw std::invalid_argument("cannot frame an empty buffer");

  FrameStack st;
  st.hop = frame_len / 2;
  st.window = periodic_hamming(frame_len);
  st.original_len = buf.size();
  st.sample_rate_hz = buf.sample_rate_hz;

  const std::size_t count = frame_count(buf.size(), frame_len);
  st.frames.assign(count, std::vector<double>(frame_len, 0.0));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t start = i * st.hop;
    const std::size_t avail = std::min(frame_len, buf.size() - std::min(buf.size(), start));
    for (std::size_t n = 0; n < avail; ++n)
      st.frames[i][n] = buf.samples[start + n] * st.window[n];
  }
  return st;
}

/// Sums frames at their hops and divides by the realized window sum.
inline AudioBuffer overlap_add(const FrameStack& st) {
  const std::size_t len = st.frame_len();
  if (len == 0 || st.hop == 0 || st.frames.empty())
    throw std::invalid_argument("overlap_add: malformed frame stack");
  for (const auto& f : st.frames)
    if (f.size() != len) throw std::invalid_argument("overlap_add: frame length mismatch");

  const std::size_t total = (st.frames.size() - 1) * st.hop + len;
  std::vector<double> acc(total, 0.0), wsum(total, 0.0);
  for (std::size_t i = 0; i < st.frames.size(); ++i) {
    const std::size_t start = i * st.hop;
    for (std::size_t n = 0; n < len; ++n) {
      acc[start + n] += st.frames[i][n];
      wsum[start + n] += st.window[n];
    }
  }

  AudioBuffer out;
  out.sample_rate_hz = st.sample_rate_hz;
  out.samples.resize(std::min(total, st.original_len));
  for (std::size_t n = 0; n < out.size(); ++n) out.samples[n] = acc[n] / std::max(wsum[n], 1e-8);
  return out;
}

}  // namespace wpd
