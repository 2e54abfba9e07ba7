#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace qsfl::detail {

struct RateSearchResult {
  double rate = 0.0;
  double value = 0.0;
  bool grid_unimodal = true;
};

// Coarse-to-fine scalar minimization on [r_lo, r_hi]: a uniform grid locates
// the basin, golden-section refines inside the bracketing grid cell. The
// unimodality flag records whether the grid saw a single local minimum
// (diagnostic only; the refined point is returned either way).
inline RateSearchResult minimize_rate(const std::function<double(double)>& f,
                                      double r_lo, double r_hi,
                                      int grid_points = 512, double tol = 1e-6) {
  RateSearchResult out;
  if (r_hi <= r_lo) {
    out.rate = r_lo;
    out.value = f(r_lo);
    return out;
  }
  std::vector<double> vals(grid_points);
  int best = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double r = r_lo + (r_hi - r_lo) * i / (grid_points - 1);
    vals[i] = f(r);
    if (vals[i] < vals[best]) best = i;
  }
  int minima = 0;
  for (int i = 0; i < grid_points; ++i) {
    const double slack = 1e-12 * (1.0 + std::abs(vals[i]));
    const bool left_up = (i == 0) || vals[i] < vals[i - 1] - slack;
    const bool right_up = (i == grid_points - 1) || vals[i] < vals[i + 1] - slack;
    if (left_up && right_up) ++minima;
  }
  out.grid_unimodal = minima <= 1;

  const double step = (r_hi - r_lo) / (grid_points - 1);
  double lo = std::max(r_lo, r_lo + step * (best - 1));
  double hi = std::min(r_hi, r_lo + step * (best + 1));
  const double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  out.rate = 0.5 * (lo + hi);
  out.value = f(out.rate);
  // The grid minimum wins if refinement drifted uphill (can happen at the
  // domain edges).
  const double rbest = r_lo + step * best;
  if (vals[best] < out.value) {
    out.rate = rbest;
    out.value = vals[best];
  }
  return out;
}

}  // namespace qsfl::detail
