#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

#include "test_signals.hpp"
#include "wpd/audio_io.hpp"

using namespace wpd;
using wpd::testing::TempDir;

namespace {

void le16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back(v >> 8);
}
void le32(std::vector<unsigned char>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

// Hand-assembled RIFF/WAVE with an arbitrary format header and raw data bytes.
std::vector<unsigned char> make_wav(std::uint16_t format, std::uint16_t channels,
                                    std::uint16_t bits, const std::vector<unsigned char>& data,
                                    std::uint32_t rate = 8000) {
  std::vector<unsigned char> b = {'R', 'I', 'F', 'F'};
  le32(b, static_cast<std::uint32_t>(36 + data.size()));
  b.insert(b.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  le32(b, 16);
  le16(b, format);
  le16(b, channels);
  le32(b, rate);
  le32(b, rate * channels * bits / 8);
  le16(b, static_cast<std::uint16_t>(channels * bits / 8));
  le16(b, bits);
  b.insert(b.end(), {'d', 'a', 't', 'a'});
  le32(b, static_cast<std::uint32_t>(data.size()));
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

std::vector<unsigned char> pcm16(const std::vector<std::int16_t>& v) {
  std::vector<unsigned char> out;
  for (auto s : v) le16(out, static_cast<std::uint16_t>(s));
  return out;
}

void dump(const std::string& path, const std::vector<unsigned char>& bytes) {
  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

WavError::Kind read_error_kind(const std::string& path) {
  try {
    read_wav(path);
  } catch (const WavError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "read_wav did not throw";
  return WavError::Kind::kUnwritable;
}

}  // namespace

TEST(ReadWav, ScalesSixteenBitSamples) {
  TempDir dir("io");
  dump(dir.file("a.wav"), make_wav(1, 1, 16, pcm16({0, 16384, -32768})));
  const AudioBuffer b = read_wav(dir.file("a.wav"));
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b.samples[0], 0.0);
  EXPECT_EQ(b.samples[1], 0.5);
  EXPECT_EQ(b.samples[2], -1.0);
  EXPECT_EQ(b.sample_rate_hz, 8000);
}

TEST(ReadWav, AveragesChannels) {
  TempDir dir("io");
  // One stereo frame: left at full scale (32767 ~ 1.0), right silent.
  dump(dir.file("s.wav"), make_wav(1, 2, 16, pcm16({16384, 0})));
  const AudioBuffer b = read_wav(dir.file("s.wav"));
  ASSERT_EQ(b.size(), 1u);
  EXPECT_DOUBLE_EQ(b.samples[0], 0.25);

  dump(dir.file("s2.wav"), make_wav(1, 2, 16, pcm16({32767, 0})));
  EXPECT_NEAR(read_wav(dir.file("s2.wav")).samples[0], 0.5, 1.0 / 32768.0);
}

TEST(ReadWav, PassesSampleRateThrough) {
  TempDir dir("io");
  dump(dir.file("r.wav"), make_wav(1, 1, 16, pcm16({1, 2}), 44100));
  EXPECT_EQ(read_wav(dir.file("r.wav")).sample_rate_hz, 44100);
}

TEST(ReadWav, DistinctErrors) {
  TempDir dir("io");
  EXPECT_EQ(read_error_kind(dir.file("missing.wav")), WavError::Kind::kMissingFile);

  dump(dir.file("float.wav"), make_wav(3, 1, 32, std::vector<unsigned char>(8, 0)));
  EXPECT_EQ(read_error_kind(dir.file("float.wav")), WavError::Kind::kUnsupportedFormat);

  dump(dir.file("u8.wav"), make_wav(1, 1, 8, {128, 129}));
  EXPECT_EQ(read_error_kind(dir.file("u8.wav")), WavError::Kind::kUnsupportedFormat);

  dump(dir.file("junk.wav"), {'J', 'U', 'N', 'K', 0, 0, 0, 0, 'W', 'A', 'V', 'E'});
  EXPECT_EQ(read_error_kind(dir.file("junk.wav")), WavError::Kind::kUnsupportedFormat);

  auto bytes = make_wav(1, 1, 16, pcm16({1, 2, 3, 4}));
  bytes.resize(bytes.size() - 3);
  dump(dir.file("trunc.wav"), bytes);
  EXPECT_EQ(read_error_kind(dir.file("trunc.wav")), WavError::Kind::kTruncated);

  dump(dir.file("tiny.wav"), {'R', 'I', 'F', 'F'});
  EXPECT_EQ(read_error_kind(dir.file("tiny.wav")), WavError::Kind::kTruncated);
}

TEST(ReadWav, SkipsUnknownChunks) {
  TempDir dir("io");
  auto bytes = make_wav(1, 1, 16, pcm16({100, -100}));
  // Splice a LIST chunk with an odd length (padded) between fmt and data.
  std::vector<unsigned char> list = {'L', 'I', 'S', 'T', 3, 0, 0, 0, 'a', 'b', 'c', 0};
  bytes.insert(bytes.begin() + 36, list.begin(), list.end());
  dump(dir.file("list.wav"), bytes);
  const AudioBuffer b = read_wav(dir.file("list.wav"));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_DOUBLE_EQ(b.samples[0], 100.0 / 32768.0);
}

TEST(WriteWav, ClampsAndScales) {
  TempDir dir("io");
  write_wav({{0.0, 2.0, -1.0, -3.0, 0.5}, 8000}, dir.file("w.wav"));
  const AudioBuffer b = read_wav(dir.file("w.wav"));
  ASSERT_EQ(b.size(), 5u);
  EXPECT_EQ(b.samples[0], 0.0);
  EXPECT_EQ(b.samples[1] * 32768.0, 32767.0);
  EXPECT_EQ(b.samples[2] * 32768.0, -32768.0);
  EXPECT_EQ(b.samples[3] * 32768.0, -32768.0);
  EXPECT_EQ(b.samples[4], 0.5);
}

TEST(WriteWav, RoundTripWithinOneStep) {
  TempDir dir("io");
  AudioBuffer src = wpd::testing::white_noise(4000, 3, 0.3);
  write_wav(src, dir.file("rt.wav"));
  const AudioBuffer back = read_wav(dir.file("rt.wav"));
  ASSERT_EQ(back.size(), src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double expect = std::clamp(src.samples[i], -1.0, 1.0 - 1.0 / 32768.0);
    EXPECT_LE(std::abs(back.samples[i] - expect), 1.0 / 32768.0);
  }
}

TEST(WriteWav, UnwritablePath) {
  try {
    write_wav({{0.0}, 8000}, "/nonexistent_dir_wpd/x.wav");
    FAIL();
  } catch (const WavError& e) {
    EXPECT_EQ(e.kind(), WavError::Kind::kUnwritable);
  }
}

TEST(MixAtSnr, HitsRequestedSnr) {
  const AudioBuffer clean = wpd::testing::harmonic_speech(1.0);
  const AudioBuffer noise = wpd::testing::white_noise(clean.size() + 500, 11);
  for (double snr : {-15.0, -5.0, 0.0, 7.5, 20.0}) {
    const AudioBuffer mixed = mix_at_snr(clean, noise, snr);
    ASSERT_EQ(mixed.size(), clean.size());
    EXPECT_NEAR(measured_snr_db(clean.samples, mixed.samples), snr, 0.01) << snr;
  }
}

TEST(MixAtSnr, GainFormula) {
  // Unit-power sine and unit-power noise at 10 dB: g = 10^(-0.5).
  const std::size_t n = 8000;
  AudioBuffer clean = wpd::testing::sine(250.0, n, std::sqrt(2.0));
  AudioBuffer noise = wpd::testing::white_noise(n, 5);
  const double p_c = detail::mean_power(clean.samples);
  const double p_n = detail::mean_power(noise.samples);
  for (auto& v : clean.samples) v /= std::sqrt(p_c);
  for (auto& v : noise.samples) v /= std::sqrt(p_n);
  const AudioBuffer mixed = mix_at_snr(clean, noise, 10.0);
  const double g = (mixed.samples[17] - clean.samples[17]) / noise.samples[17];
  EXPECT_NEAR(g, std::pow(10.0, -0.5), 1e-12);
}

TEST(MixAtSnr, EqualPowerAtZeroDbIsUnitGain) {
  AudioBuffer clean{{1.0, -1.0, 1.0, -1.0}, 8000};
  AudioBuffer noise{{-1.0, -1.0, 1.0, 1.0}, 8000};
  const AudioBuffer m = mix_at_snr(clean, noise, 0.0);
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_DOUBLE_EQ(m.samples[i], clean.samples[i] + noise.samples[i]);
}

TEST(MixAtSnr, VeryHighSnrIsClean) {
  const AudioBuffer clean = wpd::testing::harmonic_speech(0.2);
  const AudioBuffer m = mix_at_snr(clean, wpd::testing::white_noise(clean.size(), 2), 300.0);
  for (std::size_t i = 0; i < clean.size(); ++i)
    EXPECT_NEAR(m.samples[i], clean.samples[i], 1e-10);
}

TEST(MixAtSnr, Errors) {
  const AudioBuffer clean{{0.1, 0.2, 0.3}, 8000};
  EXPECT_THROW(mix_at_snr(clean, {{1.0, 1.0}, 8000}, 0.0), std::invalid_argument);
  EXPECT_THROW(mix_at_snr(clean, {{1.0, 1.0, 1.0}, 16000}, 0.0), std::invalid_argument);
  EXPECT_THROW(mix_at_snr(clean, {{0.0, 0.0, 0.0}, 8000}, 0.0), std::invalid_argument);
  EXPECT_THROW(mix_at_snr({{0.0, 0.0}, 8000}, {{1.0, 1.0}, 8000}, 0.0), std::invalid_argument);
}
