#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpd {

/// Mono sample sequence with its sample rate. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 8000;

  std::size_t size() const { return samples.size(); }
};

class WavError : public std::runtime_error {
 public:
  enum class Kind { kMissingFile, kUnsupportedFormat, kTruncated, kUnwritable };

  WavError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

namespace detail {

inline std::uint32_t read_le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

inline void put_le32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void put_le16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

inline double mean_power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc / static_cast<double>(x.size());
}

}  // namespace detail

/// Reads a 16-bit PCM RIFF/WAVE file. Multi-channel input is averaged to mono
/// and samples are scaled by 1/32768.
inline AudioBuffer read_wav(const std::filesystem::path& path) {
  using Kind = WavError::Kind;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError(Kind::kMissingFile, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12) throw WavError(Kind::kTruncated, "file shorter than RIFF header");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw WavError(Kind::kUnsupportedFormat, "not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = detail::read_le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size())
      throw WavError(Kind::kTruncated, "chunk '" + std::string(chunk, chunk + 4) +
                                           "' runs past end of file");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw WavError(Kind::kTruncated, "fmt chunk too short");
      format = detail::read_le16(bytes.data() + body);
      channels = detail::read_le16(bytes.data() + body + 2);
      rate = detail::read_le32(bytes.data() + body + 4);
      bits = detail::read_le16(bytes.data() + body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries the real format tag in the subformat GUID.
      if (format == 0xFFFE && len >= 26) format = detail::read_le16(bytes.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_len = len;
    }
    pos = body + len + (len & 1u);
  }

  if (!have_fmt) throw WavError(Kind::kTruncated, "missing fmt chunk");
  if (format != 1 || bits != 16)
    throw WavError(Kind::kUnsupportedFormat,
                   "only 16-bit integer PCM is supported (format " + std::to_string(format) +
                       ", " + std::to_string(bits) + " bits)");
  if (channels == 0 || rate == 0)
    throw WavError(Kind::kUnsupportedFormat, "zero channels or sample rate");
  if (data == nullptr) throw WavError(Kind::kTruncated, "missing data chunk");

  const std::size_t frame_bytes = 2u * channels;
  const std::size_t n_frames = data_len / frame_bytes;
  if (n_frames == 0) throw WavError(Kind::kTruncated, "data chunk holds no samples");

  AudioBuffer buf;
  buf.sample_rate_hz = static_cast<int>(rate);
  buf.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const auto raw = static_cast<std::int16_t>(detail::read_le16(data + i * frame_bytes + 2 * c));
      acc += static_cast<double>(raw) / 32768.0;
    }
    buf.samples[i] = acc / channels;
  }
  return buf;
}

/// Writes mono 16-bit PCM. Samples are clamped to [-1, 1 - 2^-15] before scaling.
inline void write_wav(const AudioBuffer& buf, const std::filesystem::path& path) {
  std::vector<unsigned char> out;
  const auto n = static_cast<std::uint32_t>(buf.samples.size());
  const auto rate = static_cast<std::uint32_t>(buf.sample_rate_hz);
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  detail::put_le32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  detail::put_le32(out, 16);
  detail::put_le16(out, 1);
  detail::put_le16(out, 1);
  detail::put_le32(out, rate);
  detail::put_le32(out, rate * 2);
  detail::put_le16(out, 2);
  detail::put_le16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  detail::put_le32(out, 2 * n);
  constexpr double kMax = 1.0 - 1.0 / 32768.0;
  for (double s : buf.samples) {
    const double v = std::nearbyint(std::clamp(s, -1.0, kMax) * 32768.0);
    detail::put_le16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw WavError(WavError::Kind::kUnwritable, "cannot write " + path.string());
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw WavError(WavError::Kind::kUnwritable, "write failed for " + path.string());
}

/// Global SNR in dB of `test` against `reference` over the reference length.
inline double measured_snr_db(std::span<const double> reference, std::span<const double> test) {
  if (test.size() < reference.size()) throw std::invalid_argument("snr: buffers differ in length");
  double sig = 0.0, err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    sig += reference[i] * reference[i];
    const double d = test[i] - reference[i];
    err += d * d;
  }
  return 10.0 * std::log10(sig / err);
}

/// Returns clean + g * noise with g chosen so the mixture has the requested
/// global SNR. Noise is truncated to the clean length.
inline AudioBuffer mix_at_snr(const AudioBuffer& clean, const AudioBuffer& noise, double snr_db) {
  if (clean.sample_rate_hz != noise.sample_rate_hz)
    throw std::invalid_argument("mix: sample rates differ (" +
                                std::to_string(clean.sample_rate_hz) + " vs " +
                                std::to_string(noise.sample_rate_hz) + ")");
  if (noise.size() < clean.size())
    throw std::invalid_argument("mix: noise shorter than clean signal");
  const std::span<const double> noise_part(noise.samples.data(), clean.size());
  const double p_clean = detail::mean_power(clean.samples);
  const double p_noise = detail::mean_power(noise_part);
  if (!(p_clean > 0.0) || !(p_noise > 0.0))
    throw std::invalid_argument("mix: zero-power clean or noise signal");

  const double g = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  AudioBuffer out{clean.samples, clean.sample_rate_hz};
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += g * noise_part[i];
  return out;
}

}  // namespace wpd
