#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Perceptual wavelet packet transform: an orthonormal periodized db10 packet
// decomposition pruned to a Mel-like leaf set. Leaves are addressed by
// (depth, band) where band is the natural-frequency position of the node at
// that depth, i.e. the node covers [band, band + 1) * fs / 2^(depth + 1).

namespace wpd {

inline constexpr std::size_t kMaxDepth = 6;

struct WaveletFilters {
  std::vector<double> lowpass;
  std::vector<double> highpass;

  std::size_t taps() const { return lowpass.size(); }
};

/// Daubechies orthonormal scaling filter with 10 vanishing moments (20 taps),
/// obtained by minimum-phase spectral factorization.
inline WaveletFilters db10_filters() {
  static constexpr std::array<double, 20> kLow = {
      -1.326420289452124481244e-05, 9.358867032006959133405e-05,
      -1.164668551292854509515e-04, -6.858566949597116265614e-04,
      1.992405295185056117159e-03,  1.395351747052901165789e-03,
      -1.073317548333057504432e-02, 3.606553566956169655423e-03,
      3.321267405934100173976e-02,  -2.945753682187581285828e-02,
      -7.139414716639708714534e-02, 9.305736460357235116035e-02,
      1.273693403357932600827e-01,  -1.959462743773770435043e-01,
      -2.498464243273153794161e-01, 2.811723436605774607487e-01,
      6.884590394536035657419e-01,  5.272011889317255864817e-01,
      1.881768000776914890209e-01,  2.667005790055555358662e-02,
  };
  WaveletFilters f;
  f.lowpass.assign(kLow.begin(), kLow.end());
  const std::size_t L = f.lowpass.size();
  f.highpass.resize(L);
  for (std::size_t n = 0; n < L; ++n)
    f.highpass[n] = (n % 2 == 0 ? 1.0 : -1.0) * f.lowpass[L - 1 - n];
  return f;
}

struct TreeLeaf {
  std::size_t depth = 0;
  std::size_t band = 0;

  friend bool operator==(const TreeLeaf&, const TreeLeaf&) = default;
};

struct PerceptualTree {
  std::vector<TreeLeaf> leaves;

  std::size_t size() const { return leaves.size(); }

  /// Nominal band edges of leaf k in Hz.
  double lower_hz(std::size_t k, double fs) const {
    return static_cast<double>(leaves[k].band) * fs / static_cast<double>(2u << leaves[k].depth);
  }
  double upper_hz(std::size_t k, double fs) const {
    return static_cast<double>(leaves[k].band + 1) * fs /
           static_cast<double>(2u << leaves[k].depth);
  }
};

/// Throws unless the leaves tile [0, fs/2) in ascending frequency order.
inline void validate_tree(const PerceptualTree& tree) {
  if (tree.leaves.empty()) throw std::invalid_argument("tree has no leaves");
  // Walk the tiling on the finest grid (units of fs / 2^(kMaxDepth + 1)).
  std::size_t cursor = 0;
  for (const auto& leaf : tree.leaves) {
    if (leaf.depth > kMaxDepth)
      throw std::invalid_argument("tree leaf deeper than " + std::to_string(kMaxDepth));
    if (leaf.band >= (1u << leaf.depth))
      throw std::invalid_argument("tree leaf band index out of range");
    const std::size_t scale = 1u << (kMaxDepth - leaf.depth);
    if (leaf.band * scale != cursor)
      throw std::invalid_argument("tree leaves do not tile the band contiguously in order");
    cursor += scale;
  }
  if (cursor != (1u << kMaxDepth))
    throw std::invalid_argument("tree leaves do not cover the full band");
}

/// Default 24-leaf tree for 8 kHz: 62.5 Hz leaves below 1 kHz, 250 Hz leaves
/// for 1-2 kHz and 500 Hz leaves for 2-4 kHz.
inline PerceptualTree build_tree() {
  PerceptualTree t;
  for (std::size_t b = 0; b < 16; ++b) t.leaves.push_back({6, b});
  for (std::size_t b = 4; b < 8; ++b) t.leaves.push_back({4, b});
  for (std::size_t b = 4; b < 8; ++b) t.leaves.push_back({3, b});
  return t;
}

/// Parses one "depth band" pair per line; '#' starts a comment.
inline PerceptualTree parse_tree(std::istream& in) {
  PerceptualTree t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long depth = 0, band = 0;
    if (!(ls >> depth)) continue;
    std::string extra;
    if (!(ls >> band) || (ls >> extra) || depth < 0 || band < 0)
      throw std::invalid_argument("tree line " + std::to_string(lineno) +
                                  ": expected 'depth band'");
    t.leaves.push_back({static_cast<std::size_t>(depth), static_cast<std::size_t>(band)});
  }
  validate_tree(t);
  return t;
}

inline PerceptualTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tree file " + path);
  return parse_tree(in);
}

inline std::string format_tree(const PerceptualTree& tree) {
  std::ostringstream os;
  for (const auto& l : tree.leaves) os << l.depth << ' ' << l.band << '\n';
  return os.str();
}

struct SubbandSet {
  std::vector<std::vector<double>> coeffs;
  PerceptualTree tree;
  std::size_t frame_len = 0;

  std::size_t size() const { return coeffs.size(); }
};

namespace detail {

// One orthonormal analysis step with periodic extension:
//   lo[k] = sum_n h[n] x[(2k + n) mod N],  hi[k] = sum_n g[n] x[(2k + n) mod N].
inline void split(const std::vector<double>& x, const WaveletFilters& f, std::vector<double>& lo,
                  std::vector<double>& hi) {
  const std::size_t N = x.size();
  const std::size_t half = N / 2;
  const std::size_t L = f.taps();
  lo.assign(half, 0.0);
  hi.assign(half, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    double a = 0.0, d = 0.0;
    std::size_t idx = (2 * k) % N;
    for (std::size_t n = 0; n < L; ++n) {
      a += f.lowpass[n] * x[idx];
      d += f.highpass[n] * x[idx];
      if (++idx == N) idx = 0;
    }
    lo[k] = a;
    hi[k] = d;
  }
}

// Adjoint of split(); exact inverse since the periodized bank is orthonormal.
inline std::vector<double> merge(const std::vector<double>& lo, const std::vector<double>& hi,
                                 const WaveletFilters& f) {
  const std::size_t half = lo.size();
  const std::size_t N = 2 * half;
  const std::size_t L = f.taps();
  std::vector<double> x(N, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    std::size_t idx = (2 * k) % N;
    for (std::size_t n = 0; n < L; ++n) {
      x[idx] += f.lowpass[n] * lo[k] + f.highpass[n] * hi[k];
      if (++idx == N) idx = 0;
    }
  }
  return x;
}

// Downsampling after the highpass mirrors the spectrum, so a node at an odd
// frequency position has its lowpass child on the upper half.
inline std::size_t lowpass_child_band(std::size_t band) {
  return band % 2 == 0 ? 2 * band : 2 * band + 1;
}

inline void analyze_node(std::vector<double> x, std::size_t depth, std::size_t band,
                         const PerceptualTree& tree, const WaveletFilters& f,
                         std::vector<std::vector<double>>& out) {
  for (std::size_t k = 0; k < tree.size(); ++k) {
    if (tree.leaves[k].depth == depth && tree.leaves[k].band == band) {
      out[k] = std::move(x);
      return;
    }
  }
  if (depth >= kMaxDepth) throw std::invalid_argument("tree does not cover the band");
  std::vector<double> lo, hi;
  split(x, f, lo, hi);
  const std::size_t lo_band = lowpass_child_band(band);
  const std::size_t hi_band = lo_band ^ 1u;
  analyze_node(std::move(lo), depth + 1, lo_band, tree, f, out);
  analyze_node(std::move(hi), depth + 1, hi_band, tree, f, out);
}

inline std::vector<double> synthesize_node(std::size_t depth, std::size_t band,
                                           const SubbandSet& sb, const WaveletFilters& f) {
  for (std::size_t k = 0; k < sb.tree.size(); ++k)
    if (sb.tree.leaves[k].depth == depth && sb.tree.leaves[k].band == band) return sb.coeffs[k];
  if (depth >= kMaxDepth) throw std::invalid_argument("tree does not cover the band");
  const std::size_t lo_band = lowpass_child_band(band);
  const std::size_t hi_band = lo_band ^ 1u;
  return merge(synthesize_node(depth + 1, lo_band, sb, f),
               synthesize_node(depth + 1, hi_band, sb, f), f);
}

}  // namespace detail

/// Decomposes one frame into the tree's leaves, in natural frequency order.
inline SubbandSet analyze(const std::vector<double>& frame, const PerceptualTree& tree,
                          const WaveletFilters& filters) {
  constexpr std::size_t kBlock = std::size_t{1} << kMaxDepth;
  if (frame.empty() || frame.size() % kBlock != 0)
    throw std::invalid_argument("frame length " + std::to_string(frame.size()) +
                                " is not a positive multiple of " + std::to_string(kBlock));
  SubbandSet sb;
  sb.tree = tree;
  sb.frame_len = frame.size();
  sb.coeffs.resize(tree.size());
  detail::analyze_node(frame, 0, 0, tree, filters, sb.coeffs);
  return sb;
}

/// Inverse of analyze().
inline std::vector<double> synthesize(const SubbandSet& sb, const WaveletFilters& filters) {
  if (sb.coeffs.size() != sb.tree.size())
    throw std::invalid_argument("subband count does not match tree");
  for (std::size_t k = 0; k < sb.size(); ++k) {
    const std::size_t expect = sb.frame_len >> sb.tree.leaves[k].depth;
    if (sb.coeffs[k].size() != expect || expect << sb.tree.leaves[k].depth != sb.frame_len)
      throw std::invalid_argument("subband " + std::to_string(k) + " has " +
                                  std::to_string(sb.coeffs[k].size()) +
                                  " coefficients, expected " + std::to_string(expect));
  }
  return detail::synthesize_node(0, 0, sb, filters);
}

}  // namespace wpd
