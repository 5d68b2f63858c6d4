#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wpd/audio_io.hpp"

namespace wpd {

struct MetricReport {
  double snrseg_db = 0.0;
  double snrseg_improvement_db = 0.0;
  double wss = 0.0;
};

inline constexpr std::size_t kMetricFrame = 256;
inline constexpr double kSnrSegFloorDb = -10.0;
inline constexpr double kSnrSegCeilDb = 35.0;

namespace detail {

inline void require_aligned(const AudioBuffer& a, const AudioBuffer& b, const char* what) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": buffers differ in length");
  if (a.sample_rate_hz != b.sample_rate_hz)
    throw std::invalid_argument(std::string(what) + ": buffers differ in sample rate");
}

// Starts of 50%-overlapped frames that fit completely; a single frame when the
// signal is shorter than one frame.
inline std::vector<std::size_t> metric_frame_starts(std::size_t len, std::size_t frame) {
  std::vector<std::size_t> starts;
  if (len <= frame) return {0};
  for (std::size_t s = 0; s + frame <= len; s += frame / 2) starts.push_back(s);
  return starts;
}

}  // namespace detail

/// Segmental SNR: mean over 256-sample, 50%-overlapped frames of the per-frame
/// SNR clamped to [-10, 35] dB. Frames with silent clean signal are skipped.
inline double snrseg(const AudioBuffer& clean, const AudioBuffer& test) {
  detail::require_aligned(clean, test, "snrseg");
  double total = 0.0;
  std::size_t used = 0;
  for (std::size_t start : detail::metric_frame_starts(clean.size(), kMetricFrame)) {
    const std::size_t end = std::min(clean.size(), start + kMetricFrame);
    double sig = 0.0, err = 0.0;
    for (std::size_t n = start; n < end; ++n) {
      sig += clean.samples[n] * clean.samples[n];
      const double d = clean.samples[n] - test.samples[n];
      err += d * d;
    }
    if (sig <= 0.0) continue;
    const double db = err > 0.0 ? 10.0 * std::log10(sig / err) : kSnrSegCeilDb;
    total += std::clamp(db, kSnrSegFloorDb, kSnrSegCeilDb);
    ++used;
  }
  if (used == 0) throw std::invalid_argument("snrseg: clean signal is silent");
  return total / static_cast<double>(used);
}

inline double snrseg_improvement(const AudioBuffer& clean, const AudioBuffer& noisy,
                                 const AudioBuffer& enhanced) {
  return snrseg(clean, enhanced) - snrseg(clean, noisy);
}

namespace detail {

// Critical-band centres and bandwidths (Hz) of the Klatt weighted slope measure.
inline constexpr std::array<double, 25> kWssCentre = {
    50.0,    120.0,   190.0,   260.0,   330.0,   400.0,   470.0,   540.0,   617.372,
    703.378, 798.717, 904.128, 1020.38, 1148.30, 1288.72, 1442.54, 1610.70, 1794.16,
    1993.93, 2211.08, 2446.71, 2701.97, 2978.04, 3276.17, 3597.63};
inline constexpr std::array<double, 25> kWssBandwidth = {
    70.0,    70.0,    70.0,    70.0,    70.0,    70.0,    70.0,    77.3724, 86.0056,
    95.3398, 105.411, 116.256, 127.914, 140.423, 153.823, 168.154, 183.457, 199.776,
    217.153, 235.631, 255.255, 276.072, 298.126, 321.465, 346.136};
inline constexpr double kWssKmax = 20.0;
inline constexpr double kWssKlocmax = 1.0;

// Hanning window matching the usual (n / (N + 1)) WSS convention.
inline std::vector<double> wss_window(std::size_t len) {
  std::vector<double> w(len);
  for (std::size_t n = 0; n < len; ++n)
    w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n + 1) /
                                 static_cast<double>(len + 1)));
  return w;
}

// Gaussian-shaped critical-band filters on the bins [0, n_fft / 2), truncated
// below their -30 dB point.
struct WssBank {
  std::size_t n_fft = 1;
  std::vector<std::vector<double>> gains;

  WssBank(std::size_t frame, double fs) {
    while (n_fft < 2 * frame) n_fft <<= 1;
    const std::size_t half = n_fft / 2;
    const double min_factor = std::exp(-30.0 / (2.0 * 2.303));
    gains.assign(kWssCentre.size(), std::vector<double>(half, 0.0));
    for (std::size_t i = 0; i < kWssCentre.size(); ++i) {
      const double f0 = std::floor(kWssCentre[i] / (fs / 2.0) * static_cast<double>(half));
      const double bw = kWssBandwidth[i] / (fs / 2.0) * static_cast<double>(half);
      const double norm = std::log(kWssBandwidth[0]) - std::log(kWssBandwidth[i]);
      for (std::size_t j = 0; j < half; ++j) {
        const double d = static_cast<double>(j) - f0;
        const double g = std::exp(-11.0 * d * d / (bw * bw) + norm);
        gains[i][j] = g > min_factor ? g : 0.0;
      }
    }
  }

  std::vector<double> log_energies(const std::vector<double>& frame,
                                   const std::vector<double>& window,
                                   Eigen::FFT<double>& fft) const {
    std::vector<double> buf(n_fft, 0.0);
    for (std::size_t n = 0; n < frame.size(); ++n) buf[n] = frame[n] * window[n];
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, buf);
    std::vector<double> energy(gains.size());
    for (std::size_t i = 0; i < gains.size(); ++i) {
      double e = 0.0;
      for (std::size_t j = 0; j < gains[i].size(); ++j) e += std::norm(spec[j]) * gains[i][j];
      energy[i] = 10.0 * std::log10(std::max(e, 1e-10));
    }
    return energy;
  }
};

// Energy of the nearest local spectral peak for each band, following slope signs.
inline std::vector<double> nearest_peaks(const std::vector<double>& energy,
                                         const std::vector<double>& slope) {
  const std::size_t nb = slope.size();
  std::vector<double> peak(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    std::size_t n = i;
    if (slope[i] > 0.0) {
      while (n < nb && slope[n] > 0.0) ++n;
      peak[i] = energy[n];
    } else {
      while (n > 0 && slope[n - 1] <= 0.0) --n;
      peak[i] = energy[n];
    }
  }
  return peak;
}

}  // namespace detail

/// Weighted spectral slope distance (Klatt): per frame, 25 critical-band log
/// energies, adjacent-band slopes, and weights favouring bands near the global
/// and nearest local spectral peaks. Returns the mean over frames; 0 for
/// identical signals, larger is worse.
inline double wss(const AudioBuffer& clean, const AudioBuffer& test) {
  detail::require_aligned(clean, test, "wss");
  const double fs = static_cast<double>(clean.sample_rate_hz);
  const std::vector<double> window = detail::wss_window(kMetricFrame);
  const detail::WssBank bank(kMetricFrame, fs);
  Eigen::FFT<double> fft;

  double total = 0.0;
  std::size_t frames = 0;
  std::vector<double> cf(kMetricFrame), tf(kMetricFrame);
  for (std::size_t start : detail::metric_frame_starts(clean.size(), kMetricFrame)) {
    for (std::size_t n = 0; n < kMetricFrame; ++n) {
      const std::size_t i = start + n;
      cf[n] = i < clean.size() ? clean.samples[i] : 0.0;
      tf[n] = i < test.size() ? test.samples[i] : 0.0;
    }
    const auto ce = bank.log_energies(cf, window, fft);
    const auto te = bank.log_energies(tf, window, fft);
    const std::size_t nb = ce.size() - 1;
    std::vector<double> cs(nb), ts(nb);
    for (std::size_t i = 0; i < nb; ++i) {
      cs[i] = ce[i + 1] - ce[i];
      ts[i] = te[i + 1] - te[i];
    }
    const auto cpk = detail::nearest_peaks(ce, cs);
    const auto tpk = detail::nearest_peaks(te, ts);
    const double cmax = *std::max_element(ce.begin(), ce.end());
    const double tmax = *std::max_element(te.begin(), te.end());

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
      const double wc = detail::kWssKmax / (detail::kWssKmax + cmax - ce[i]) *
                        detail::kWssKlocmax / (detail::kWssKlocmax + cpk[i] - ce[i]);
      const double wt = detail::kWssKmax / (detail::kWssKmax + tmax - te[i]) *
                        detail::kWssKlocmax / (detail::kWssKlocmax + tpk[i] - te[i]);
      const double w = 0.5 * (wc + wt);
      const double d = cs[i] - ts[i];
      num += w * d * d;
      den += w;
    }
    total += den > 0.0 ? num / den : 0.0;
    ++frames;
  }
  return frames ? total / static_cast<double>(frames) : 0.0;
}

/// Magnitude STFT: 256-point periodic Hann frames at 50% overlap, zero-padded
/// at the tail. Rows are frames, columns bins 0..128.
inline std::vector<std::vector<double>> magnitude_spectrogram(const AudioBuffer& buf,
                                                              std::size_t n_fft = 256) {
  std::vector<double> window(n_fft);
  for (std::size_t n = 0; n < n_fft; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(n_fft));
  const std::size_t hop = n_fft / 2;
  const std::size_t count =
      buf.size() <= n_fft ? 1 : (buf.size() - n_fft + hop - 1) / hop + 1;
  Eigen::FFT<double> fft;
  std::vector<std::vector<double>> rows;
  rows.reserve(count);
  std::vector<double> frame(n_fft);
  std::vector<std::complex<double>> spec;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t n = 0; n < n_fft; ++n) {
      const std::size_t idx = i * hop + n;
      frame[n] = idx < buf.size() ? buf.samples[idx] * window[n] : 0.0;
    }
    fft.fwd(spec, frame);
    std::vector<double> mag(n_fft / 2 + 1);
    for (std::size_t b = 0; b < mag.size(); ++b) mag[b] = std::abs(spec[b]);
    rows.push_back(std::move(mag));
  }
  return rows;
}

}  // namespace wpd
