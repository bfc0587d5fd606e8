#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace periodlab {

struct ExtrapolationResult {
  Complex value;
  double residual;                // magnitude of the last accepted correction
  int levels_used;                // elimination depth that passed the decrease check
  std::vector<double> corrections;  // per-level correction magnitudes, for reports
};

// Richardson extrapolation for sequences seq[j] = S(h0 * ratio^j) whose error
// expands in integer powers of h. Eliminates one power per level but stops as
// soon as a level fails to shrink the correction: the error models met in
// practice (epsilon*log(epsilon) mixtures, quadrature noise) make deep
// elimination counterproductive, so the apex is chosen empirically.
inline ExtrapolationResult richardson_limit(const std::vector<Complex>& seq, double ratio) {
  if (seq.empty()) throw PeriodlabError("richardson_limit: empty sequence");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw PeriodlabError("richardson_limit: ratio must lie in (0,1)");

  const int m = static_cast<int>(seq.size());
  if (m == 1)
    return ExtrapolationResult{seq[0], std::numeric_limits<double>::infinity(), 0, {}};

  std::vector<std::vector<Complex>> table;
  table.push_back(seq);
  for (int k = 1; k < m; ++k) {
    const double qk = std::pow(ratio, k);
    const auto& prev = table.back();
    std::vector<Complex> row(prev.size() - 1);
    for (size_t j = 0; j + 1 < prev.size(); ++j)
      row[j] = (prev[j + 1] - qk * prev[j]) / (1.0 - qk);
    table.push_back(std::move(row));
  }

  std::vector<double> corrections;
  int best = 0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < m; ++k) {
    const double d = std::abs(table[k].back() - table[k - 1].back());
    corrections.push_back(d);
    if (d <= last) {
      best = k;
      last = d;
    } else {
      break;
    }
  }
  const double residual = best == 0 ? std::abs(seq.back() - seq[m - 2]) : last;
  return ExtrapolationResult{table[best].back(), residual, best, corrections};
}

// Checks that successive differences of a sequence decrease, with a little
// slack for values already at rounding level.
inline bool differences_decreasing(const std::vector<Complex>& seq, double floor_tol) {
  for (size_t j = 2; j < seq.size(); ++j) {
    const double prev = std::abs(seq[j - 1] - seq[j - 2]);
    const double cur = std::abs(seq[j] - seq[j - 1]);
    if (cur > prev && cur > floor_tol) return false;
  }
  return true;
}

}  // namespace periodlab
