#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wpd/noise_tracker.hpp"
#include "wpd/presence.hpp"
#include "wpd/pwpt.hpp"
#include "wpd/shrink.hpp"
#include "wpd/threshold.hpp"

// Flat "key = value" configuration. Presence keys follow the constant table
// names (beta is the xi averaging constant); '#' starts a comment.

namespace wpd {

struct EnhanceConfig {
  std::size_t frame_len = 640;
  ShrinkConfig shrink;
  PresenceConfig presence;
  NoiseTrackerConfig noise;
  VarianceDomain domain = VarianceDomain::kPwp;
  ThresholdSnr threshold_snr = ThresholdSnr::kPosterior;
  PerceptualTree tree = build_tree();
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void validate_config(const EnhanceConfig& cfg) {
  if (cfg.frame_len == 0 || cfg.frame_len % (std::size_t{1} << kMaxDepth) != 0)
    throw ConfigError("frame_len must be a positive multiple of 64");
  if (!(cfg.shrink.mu > 0.0)) throw ConfigError("mu must be positive");
  if (cfg.shrink.fixed_alpha < 0.0 || cfg.shrink.fixed_alpha > 1.0)
    throw ConfigError("alpha must lie in [0, 1]");
  if (cfg.presence.kappa < 0.0 || cfg.presence.kappa >= 1.0)
    throw ConfigError("beta must lie in [0, 1)");
  if (!(cfg.presence.xi_max_db > cfg.presence.xi_min_db))
    throw ConfigError("xi_max must exceed xi_min");
  if (cfg.noise.smoothing < 0.0 || cfg.noise.smoothing >= 1.0)
    throw ConfigError("noise_smoothing must lie in [0, 1)");
  if (cfg.noise.minima_window == 0) throw ConfigError("minima_window must be positive");
  if (!(cfg.noise.minima_bias > 0.0)) throw ConfigError("minima_bias must be positive");
  validate_tree(cfg.tree);
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(d))
    throw ConfigError("config key '" + key + "': not a number: '" + v + "'");
  return d;
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (d < 0.0 || d != std::floor(d))
    throw ConfigError("config key '" + key + "': expected a non-negative integer");
  return static_cast<std::size_t>(d);
}

// Inline tree form: "depth/band depth/band ...".
inline PerceptualTree parse_inline_tree(const std::string& v) {
  std::string lines = v;
  for (char& c : lines) {
    if (c == '/') c = ' ';
    else if (c == ',' || c == ';') c = '\n';
  }
  // Each "d b" pair was separated by whitespace, so regroup tokens pairwise.
  std::istringstream tokens(lines);
  std::ostringstream pairs;
  std::string d, b;
  while (tokens >> d) {
    if (!(tokens >> b)) throw ConfigError("tree: odd number of fields");
    pairs << d << ' ' << b << '\n';
  }
  std::istringstream in(pairs.str());
  try {
    return parse_tree(in);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("tree: ") + e.what());
  }
}

}  // namespace detail

/// Applies one key to `cfg`; unknown keys are rejected.
inline void apply_config_key(EnhanceConfig& cfg, const std::string& key, const std::string& v) {
  using detail::parse_count;
  using detail::parse_double;
  static const std::map<std::string, std::function<void(EnhanceConfig&, const std::string&)>>
      kSetters = {
          {"frame_len", [](auto& c, auto& s) { c.frame_len = parse_count("frame_len", s); }},
          {"mu", [](auto& c, auto& s) { c.shrink.mu = parse_double("mu", s); }},
          {"alpha_mode",
           [](auto& c, auto& s) {
             if (s == "dynamic") c.shrink.alpha_mode = AlphaMode::kDynamic;
             else if (s == "fixed") c.shrink.alpha_mode = AlphaMode::kFixed;
             else throw ConfigError("alpha_mode must be 'dynamic' or 'fixed'");
           }},
          {"alpha", [](auto& c, auto& s) { c.shrink.fixed_alpha = parse_double("alpha", s); }},
          {"beta", [](auto& c, auto& s) { c.presence.kappa = parse_double("beta", s); }},
          {"xi_min_db", [](auto& c, auto& s) { c.presence.xi_min_db = parse_double("xi_min_db", s); }},
          {"xi_max_db", [](auto& c, auto& s) { c.presence.xi_max_db = parse_double("xi_max_db", s); }},
          {"xi_peak_db",
           [](auto& c, auto& s) { c.presence.xi_peak_db = parse_double("xi_peak_db", s); }},
          {"w_local", [](auto& c, auto& s) { c.presence.w_local = parse_count("w_local", s); }},
          {"w_global", [](auto& c, auto& s) { c.presence.w_global = parse_count("w_global", s); }},
          {"xi_recursion",
           [](auto& c, auto& s) {
             if (s == "coefficient") c.presence.recursion = XiRecursion::kCoefficient;
             else if (s == "frame") c.presence.recursion = XiRecursion::kFrame;
             else throw ConfigError("xi_recursion must be 'coefficient' or 'frame'");
           }},
          {"noise_smoothing",
           [](auto& c, auto& s) { c.noise.smoothing = parse_double("noise_smoothing", s); }},
          {"minima_window",
           [](auto& c, auto& s) { c.noise.minima_window = parse_count("minima_window", s); }},
          {"minima_bias",
           [](auto& c, auto& s) { c.noise.minima_bias = parse_double("minima_bias", s); }},
          {"bootstrap_frames",
           [](auto& c, auto& s) { c.noise.bootstrap_frames = parse_count("bootstrap_frames", s); }},
          {"variance_domain",
           [](auto& c, auto& s) {
             if (s == "pwp") c.domain = VarianceDomain::kPwp;
             else if (s == "te") c.domain = VarianceDomain::kTe;
             else throw ConfigError("variance_domain must be 'pwp' or 'te'");
           }},
          {"threshold_snr",
           [](auto& c, auto& s) {
             if (s == "posterior") c.threshold_snr = ThresholdSnr::kPosterior;
             else if (s == "inverse") c.threshold_snr = ThresholdSnr::kInverse;
             else throw ConfigError("threshold_snr must be 'posterior' or 'inverse'");
           }},
          {"tree", [](auto& c, auto& s) { c.tree = detail::parse_inline_tree(s); }},
          {"tree_file",
           [](auto& c, auto& s) {
             try {
               c.tree = load_tree(s);
             } catch (const std::exception& e) {
               throw ConfigError(std::string("tree_file: ") + e.what());
             }
           }},
      };
  const auto it = kSetters.find(key);
  if (it == kSetters.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second(cfg, v);
}

inline EnhanceConfig parse_config(std::istream& in, EnhanceConfig cfg = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_config_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
  validate_config(cfg);
  return cfg;
}

inline EnhanceConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

/// Writes every key with its effective value; parse_config() reads it back exactly.
inline std::string dump_config(const EnhanceConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "frame_len = " << cfg.frame_len << '\n'
     << "mu = " << cfg.shrink.mu << '\n'
     << "alpha_mode = " << (cfg.shrink.alpha_mode == AlphaMode::kFixed ? "fixed" : "dynamic")
     << '\n'
     << "alpha = " << cfg.shrink.fixed_alpha << '\n'
     << "beta = " << cfg.presence.kappa << '\n'
     << "xi_min_db = " << cfg.presence.xi_min_db << '\n'
     << "xi_max_db = " << cfg.presence.xi_max_db << '\n'
     << "xi_peak_db = " << cfg.presence.xi_peak_db << '\n'
     << "w_local = " << cfg.presence.w_local << '\n'
     << "w_global = " << cfg.presence.w_global << '\n'
     << "xi_recursion = "
     << (cfg.presence.recursion == XiRecursion::kFrame ? "frame" : "coefficient") << '\n'
     << "noise_smoothing = " << cfg.noise.smoothing << '\n'
     << "minima_window = " << cfg.noise.minima_window << '\n'
     << "minima_bias = " << cfg.noise.minima_bias << '\n'
     << "bootstrap_frames = " << cfg.noise.bootstrap_frames << '\n'
     << "variance_domain = " << (cfg.domain == VarianceDomain::kTe ? "te" : "pwp") << '\n'
     << "threshold_snr = "
     << (cfg.threshold_snr == ThresholdSnr::kInverse ? "inverse" : "posterior") << '\n'
     << "tree =";
  for (const auto& l : cfg.tree.leaves) os << ' ' << l.depth << '/' << l.band;
  os << '\n';
  return os.str();
}

}  // namespace wpd
