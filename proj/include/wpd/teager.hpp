#pragma once

#include <vector>

#include "wpd/pwpt.hpp"

namespace wpd {

/// Teager-energy-operated coefficients, shaped like the source SubbandSet.
struct TeCoeffs {
  std::vector<std::vector<double>> values;

  std::size_t size() const { return values.size(); }
};

/// Discrete Teager energy of one sequence: x[m]^2 - x[m+1] x[m-1] in the
/// interior, x[m]^2 at both ends.
inline std::vector<double> teager_energy(const std::vector<double>& x) {
  std::vector<double> t(x.size());
  if (x.empty()) return t;
  t.front() = x.front() * x.front();
  t.back() = x.back() * x.back();
  for (std::size_t m = 1; m + 1 < x.size(); ++m) t[m] = x[m] * x[m] - x[m + 1] * x[m - 1];
  return t;
}

inline TeCoeffs te_operator(const SubbandSet& sb) {
  TeCoeffs te;
  te.values.reserve(sb.size());
  for (const auto& band : sb.coeffs) te.values.push_back(teager_energy(band));
  return te;
}

}  // namespace wpd
