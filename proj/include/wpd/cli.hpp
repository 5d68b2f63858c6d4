#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wpd/audio_io.hpp"
#include "wpd/config.hpp"
#include "wpd/enhancer.hpp"
#include "wpd/metrics.hpp"
#include "wpd/pwpt.hpp"
#include "wpd/shrink.hpp"
#include "wpd/stats.hpp"
#include "wpd/teager.hpp"
#include "wpd/threshold.hpp"

namespace wpd::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kProcessing = 3 };

/// Shortest text that parses back to exactly the same double.
inline std::string fmt_exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f << text;
  if (!f) throw IoError("write failed for " + path);
}

inline EnhanceConfig config_from(const std::string& path) {
  if (path.empty()) return {};
  if (!std::filesystem::exists(path)) throw IoError("config file not found: " + path);
  return load_config(path);
}

inline std::string threshold_curve_csv(double min_db, double max_db, double step, double chi2) {
  std::ostringstream os;
  os << "snr_db,lambda_erlang,lambda_student,lambda_gaussian\n";
  const auto steps = static_cast<long>(std::floor((max_db - min_db) / step + 1e-9));
  for (long i = 0; i <= steps; ++i) {
    const double snr_db = min_db + static_cast<double>(i) * step;
    // Unit signal power: gamma = SNR and the noise power is 1 / gamma.
    const double gamma = std::pow(10.0, snr_db / 10.0);
    const double sigma_n2 = 1.0 / gamma;
    os << fmt_exact(snr_db) << ',' << fmt_exact(lambda_erlang(sigma_n2, gamma)) << ','
       << fmt_exact(lambda_student(sigma_n2, gamma, chi2)) << ','
       << fmt_exact(lambda_gaussian(sigma_n2, gamma)) << '\n';
  }
  return os.str();
}

inline std::string shrink_curve_csv(double lambda1, double mu, double alpha, std::size_t points) {
  std::ostringstream os;
  os << "y,semisoft,mu_law,custom\n";
  const double lambda2 = 2.0 * lambda1;
  for (std::size_t i = 0; i < points; ++i) {
    const double y = -3.0 * lambda1 + 6.0 * lambda1 * static_cast<double>(i) /
                                          static_cast<double>(points - 1);
    os << fmt_exact(y) << ',' << fmt_exact(semisoft(y, lambda1, lambda2)) << ','
       << fmt_exact(mu_law(y, lambda1, mu)) << ','
       << fmt_exact(apply_shrink(y, lambda1, lambda2, alpha, mu)) << '\n';
  }
  return os.str();
}

inline std::string fit_csv(const AudioBuffer& noisy, const EnhanceConfig& cfg) {
  const WaveletFilters filters = db10_filters();
  const FrameStack st = split_frames(noisy, cfg.frame_len);
  std::vector<std::vector<double>> pooled(cfg.tree.size());
  for (const auto& frame : st.frames) {
    const TeCoeffs te = te_operator(analyze(frame, cfg.tree, filters));
    for (std::size_t k = 0; k < te.size(); ++k)
      pooled[k].insert(pooled[k].end(), te.values[k].begin(), te.values[k].end());
  }
  std::ostringstream os;
  os << "subband,AIC_erlang2,AIC_gaussian,AIC_studentt\n";
  for (std::size_t k = 0; k < pooled.size(); ++k) {
    os << k << ',' << fmt_exact(aic_index(pooled[k], PdfKind::kErlang2).aic) << ','
       << fmt_exact(aic_index(pooled[k], PdfKind::kGaussian).aic) << ','
       << fmt_exact(aic_index(pooled[k], PdfKind::kStudentT).aic) << '\n';
  }
  return os.str();
}

inline std::string spectrogram_csv(const AudioBuffer& buf) {
  constexpr std::size_t kFft = 256;
  const auto rows = magnitude_spectrogram(buf, kFft);
  const double fs = buf.sample_rate_hz;
  std::ostringstream os;
  os << "time_s";
  for (std::size_t b = 0; b <= kFft / 2; ++b)
    os << ",hz_" << fmt_exact(static_cast<double>(b) * fs / kFft);
  os << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << fmt_exact(static_cast<double>(i * kFft / 2) / fs);
    for (double v : rows[i]) os << ',' << fmt_exact(v);
    os << '\n';
  }
  return os.str();
}

}  // namespace detail

/// Command-line entry point. Exit codes: 0 success, 1 usage, 2 I/O, 3 processing.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Wavelet packet speech enhancement with Erlang-2 subband thresholds", "wpdenoise"};
  app.require_subcommand(1);

  // enhance
  std::vector<std::string> enh_in, enh_out;
  std::string enh_config, enh_oracle, enh_dump;
  auto* enhance = app.add_subcommand("enhance", "Enhance noisy WAV files");
  enhance->add_option("--in", enh_in, "Noisy input WAV (repeatable)")->required();
  enhance->add_option("--out", enh_out, "Enhanced output WAV, one per --in")->required();
  enhance->add_option("--config", enh_config, "key = value configuration file");
  enhance->add_option("--noise-oracle", enh_oracle,
                      "Noise-only WAV; fixes noise powers instead of tracking them");
  enhance->add_option("--dump-config", enh_dump, "Write the effective configuration here");

  // mix
  std::string mix_clean, mix_noise, mix_out;
  double mix_snr = 0.0;
  auto* mix = app.add_subcommand("mix", "Add noise to clean speech at a target SNR");
  mix->add_option("--clean", mix_clean, "Clean WAV")->required();
  mix->add_option("--noise", mix_noise, "Noise WAV, at least as long as the clean one")
      ->required();
  mix->add_option("--snr-db", mix_snr, "Target global SNR in dB")->required();
  mix->add_option("--out", mix_out, "Output WAV")->required();

  // eval
  std::string ev_clean, ev_noisy, ev_enh;
  auto* eval = app.add_subcommand(
      "eval", "Objective metrics. CSV columns: file,snr_db,snrseg_improvement,wss");
  eval->add_option("--clean", ev_clean, "Clean reference WAV")->required();
  eval->add_option("--noisy", ev_noisy, "Noisy WAV")->required();
  eval->add_option("--enhanced", ev_enh, "Enhanced WAV")->required();

  // fit
  std::string fit_in, fit_out, fit_config;
  auto* fit = app.add_subcommand(
      "fit",
      "Per-subband AIC of TE-operated coefficients. CSV columns: "
      "subband,AIC_erlang2,AIC_gaussian,AIC_studentt");
  fit->add_option("--in", fit_in, "Input WAV")->required();
  fit->add_option("--out", fit_out, "Output CSV (default stdout)");
  fit->add_option("--config", fit_config, "Configuration file (frame length, tree)");

  // threshold-curve
  double tc_min = -15.0, tc_max = 15.0, tc_step = 1.0, tc_chi2 = 0.5;
  std::string tc_out;
  auto* tcurve = app.add_subcommand(
      "threshold-curve",
      "Thresholds vs SNR for unit signal power. CSV columns: "
      "snr_db,lambda_erlang,lambda_student,lambda_gaussian");
  tcurve->add_option("--min-db", tc_min, "First SNR (dB)")->capture_default_str();
  tcurve->add_option("--max-db", tc_max, "Last SNR (dB)")->capture_default_str();
  tcurve->add_option("--step", tc_step, "SNR step (dB)")->capture_default_str()
      ->check(CLI::PositiveNumber);
  tcurve->add_option("--chi2", tc_chi2, "Student-t chi2 constant")->capture_default_str()
      ->check(CLI::PositiveNumber);
  tcurve->add_option("--out", tc_out, "Output CSV (default stdout)");

  // shrink-curve
  double sc_lambda = 1.0, sc_mu = 0.9, sc_alpha = 0.5;
  std::size_t sc_points = 601;
  std::string sc_out;
  auto* scurve = app.add_subcommand(
      "shrink-curve",
      "Input/output of the shrinkage rules over [-3 lambda1, 3 lambda1], lambda2 = 2 lambda1. "
      "CSV columns: y,semisoft,mu_law,custom");
  scurve->add_option("--lambda1", sc_lambda, "Lower threshold")->capture_default_str()
      ->check(CLI::PositiveNumber);
  scurve->add_option("--mu", sc_mu, "mu-law constant")->capture_default_str()
      ->check(CLI::PositiveNumber);
  scurve->add_option("--alpha", sc_alpha, "Shape parameter of the custom rule")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  scurve->add_option("--points", sc_points, "Number of samples")->capture_default_str()
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  scurve->add_option("--out", sc_out, "Output CSV (default stdout)");

  // spectrogram
  std::string sp_in, sp_out;
  auto* spec = app.add_subcommand(
      "spectrogram",
      "Magnitude STFT (256-point periodic Hann, 50% overlap). CSV rows are frames: "
      "time_s then one column per bin");
  spec->add_option("--in", sp_in, "Input WAV")->required();
  spec->add_option("--out", sp_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*enhance) {
      if (enh_in.size() != enh_out.size()) {
        err << "enhance: need exactly one --out per --in\n";
        return kUsage;
      }
      const EnhanceConfig cfg = detail::config_from(enh_config);
      if (!enh_dump.empty()) detail::write_text(enh_dump, dump_config(cfg), out);
      std::optional<AudioBuffer> oracle;
      if (!enh_oracle.empty()) oracle = read_wav(enh_oracle);
      std::vector<AudioBuffer> inputs;
      for (const auto& p : enh_in) inputs.push_back(read_wav(p));
      std::mutex err_mu;
      std::vector<std::future<AudioBuffer>> jobs;
      for (const auto& in : inputs) {
        jobs.push_back(std::async(std::launch::async, [&in, &cfg, &oracle, &err, &err_mu] {
          WarningSink sink = [&err, &err_mu](std::string_view m) {
            std::lock_guard lock(err_mu);
            err << "warning: " << m << '\n';
          };
          return oracle ? enhance_stream(in, *oracle, cfg, sink) : enhance_stream(in, cfg, sink);
        }));
      }
      for (std::size_t i = 0; i < jobs.size(); ++i) write_wav(jobs[i].get(), enh_out[i]);
    } else if (*mix) {
      write_wav(mix_at_snr(read_wav(mix_clean), read_wav(mix_noise), mix_snr), mix_out);
    } else if (*eval) {
      const AudioBuffer clean = read_wav(ev_clean);
      const AudioBuffer noisy = read_wav(ev_noisy);
      const AudioBuffer enh = read_wav(ev_enh);
      out << "file,snr_db,snrseg_improvement,wss\n"
          << '"' << ev_enh << '"' << ',' << fmt_exact(measured_snr_db(clean.samples, noisy.samples))
          << ',' << fmt_exact(snrseg_improvement(clean, noisy, enh)) << ','
          << fmt_exact(wss(clean, enh)) << '\n';
    } else if (*fit) {
      const EnhanceConfig cfg = detail::config_from(fit_config);
      detail::write_text(fit_out, detail::fit_csv(read_wav(fit_in), cfg), out);
    } else if (*tcurve) {
      if (tc_max < tc_min) {
        err << "threshold-curve: --max-db must not be below --min-db\n";
        return kUsage;
      }
      detail::write_text(tc_out, detail::threshold_curve_csv(tc_min, tc_max, tc_step, tc_chi2),
                         out);
    } else if (*scurve) {
      detail::write_text(sc_out, detail::shrink_curve_csv(sc_lambda, sc_mu, sc_alpha, sc_points),
                         out);
    } else if (*spec) {
      detail::write_text(sp_out, detail::spectrogram_csv(read_wav(sp_in)), out);
    }
  } catch (const WavError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const detail::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kProcessing;
  }
  return kOk;
}

}  // namespace wpd::cli
