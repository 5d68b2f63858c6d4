#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "test_signals.hpp"
#include "wpd/config.hpp"

using namespace wpd;

namespace {

EnhanceConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST(Config, Defaults) {
  const EnhanceConfig c;
  EXPECT_EQ(c.frame_len, 640u);
  EXPECT_EQ(c.shrink.mu, 0.9);
  EXPECT_EQ(c.presence.kappa, 0.7);
  EXPECT_EQ(c.presence.xi_min_db, -10.0);
  EXPECT_EQ(c.presence.xi_max_db, -5.0);
  EXPECT_EQ(c.presence.xi_peak_db, 10.0);
  EXPECT_EQ(c.noise.smoothing, 0.85);
  EXPECT_EQ(c.noise.minima_window, 8u);
  EXPECT_EQ(c.noise.minima_bias, 1.5);
  EXPECT_EQ(c.domain, VarianceDomain::kPwp);
  EXPECT_EQ(c.threshold_snr, ThresholdSnr::kPosterior);
  EXPECT_EQ(c.tree.leaves, build_tree().leaves);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, ParsesEveryKey) {
  const EnhanceConfig c = parse(R"(# experiment
frame_len = 1280
mu = 0.5        # trailing comment
alpha_mode = fixed
alpha = 0.3
beta = 0.6
xi_min_db = -12
xi_max_db = -4
xi_peak_db = 8
w_local = 2
w_global = 10
xi_recursion = frame
noise_smoothing = 0.9
minima_window = 12
minima_bias = 1.2
bootstrap_frames = 5
variance_domain = te
threshold_snr = inverse
tree = 1/0 2/2 2/3
)");
  EXPECT_EQ(c.frame_len, 1280u);
  EXPECT_EQ(c.shrink.mu, 0.5);
  EXPECT_EQ(c.shrink.alpha_mode, AlphaMode::kFixed);
  EXPECT_EQ(c.shrink.fixed_alpha, 0.3);
  EXPECT_EQ(c.presence.kappa, 0.6);
  EXPECT_EQ(c.presence.xi_min_db, -12.0);
  EXPECT_EQ(c.presence.xi_max_db, -4.0);
  EXPECT_EQ(c.presence.xi_peak_db, 8.0);
  EXPECT_EQ(c.presence.w_local, 2u);
  EXPECT_EQ(c.presence.w_global, 10u);
  EXPECT_EQ(c.presence.recursion, XiRecursion::kFrame);
  EXPECT_EQ(c.noise.smoothing, 0.9);
  EXPECT_EQ(c.noise.minima_window, 12u);
  EXPECT_EQ(c.noise.minima_bias, 1.2);
  EXPECT_EQ(c.noise.bootstrap_frames, 5u);
  EXPECT_EQ(c.domain, VarianceDomain::kTe);
  EXPECT_EQ(c.threshold_snr, ThresholdSnr::kInverse);
  EXPECT_EQ(c.tree.leaves, (std::vector<TreeLeaf>{{1, 0}, {2, 2}, {2, 3}}));
}

TEST(Config, DumpRoundTrips) {
  EnhanceConfig c;
  c.shrink.mu = 0.1 + 0.2;  // not representable in short decimal form
  c.presence.xi_min_db = -10.000000000000002;
  c.threshold_snr = ThresholdSnr::kInverse;
  c.tree = {{{1, 0}, {2, 2}, {3, 6}, {3, 7}}};
  const std::string text = dump_config(c);
  const EnhanceConfig back = parse(text);
  EXPECT_EQ(back.shrink.mu, c.shrink.mu);
  EXPECT_EQ(back.presence.xi_min_db, c.presence.xi_min_db);
  EXPECT_EQ(back.threshold_snr, c.threshold_snr);
  EXPECT_EQ(back.tree.leaves, c.tree.leaves);
  EXPECT_EQ(dump_config(back), text);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse("mu 0.9\n"), ConfigError);
  EXPECT_THROW(parse("mu = abc\n"), ConfigError);
  EXPECT_THROW(parse("mu = -1\n"), ConfigError);
  EXPECT_THROW(parse("frame_len = 100\n"), ConfigError);
  EXPECT_THROW(parse("frame_len = 64.5\n"), ConfigError);
  EXPECT_THROW(parse("alpha = 1.5\n"), ConfigError);
  EXPECT_THROW(parse("alpha_mode = sometimes\n"), ConfigError);
  EXPECT_THROW(parse("beta = 1\n"), ConfigError);
  EXPECT_THROW(parse("xi_max_db = -20\n"), ConfigError);
  EXPECT_THROW(parse("minima_window = 0\n"), ConfigError);
  EXPECT_THROW(parse("variance_domain = fft\n"), ConfigError);
  EXPECT_THROW(parse("threshold_snr = maybe\n"), ConfigError);
  EXPECT_THROW(parse("xi_recursion = sideways\n"), ConfigError);
  EXPECT_THROW(parse("tree = 1/0 1\n"), ConfigError);
  EXPECT_THROW(parse("tree = 1/0\n"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/wpd.cfg"), ConfigError);
}

TEST(Config, TreeFile) {
  wpd::testing::TempDir dir("cfg");
  {
    std::ofstream t(dir.file("tree.txt"));
    t << "# two halves\n1 0\n1 1\n";
    std::ofstream c(dir.file("a.cfg"));
    c << "tree_file = " << dir.file("tree.txt") << "\n";
  }
  EXPECT_EQ(load_config(dir.file("a.cfg")).tree.leaves, (std::vector<TreeLeaf>{{1, 0}, {1, 1}}));
  EXPECT_THROW(parse("tree_file = " + dir.file("missing.txt") + "\n"), ConfigError);
}
