#include "qsfl/waterfill.hpp"

#include <cmath>

namespace qsfl::waterfill {
namespace {

struct Level {
  double log2_lambda;
  int active;
};

// Shared window scan: find n and log2(lambda) such that exactly the n largest
// variances sit above the water level.
Level solve(const std::vector<double>& vars, double total_rate) {
  const int k = static_cast<int>(vars.size());
  if (k == 0) throw EmptyFrame("waterfill: empty frame");
  if (!(total_rate >= 0.0)) throw DomainError("waterfill: negative total rate");
  std::vector<double> lg(k);
  for (int j = 0; j < k; ++j) {
    if (!(vars[j] > 0.0)) throw DomainError("waterfill: variances must be positive");
    if (j > 0 && vars[j] > vars[j - 1])
      throw DomainError("waterfill: variances must be sorted descending");
    lg[j] = std::log2(vars[j]);
  }
  if (total_rate == 0.0) return {lg[0], 0};
  double prefix = 0.0;
  for (int m = 1; m <= k; ++m) {
    prefix += lg[m - 1];
    const double cand = (prefix - total_rate) / m;
    // Window test: lambda below the m-th variance (inclusive: a level equal
    // to the next variance belongs to the larger active set) and above the
    // (m+1)-th.
    if (cand <= lg[m - 1] && (m == k || cand > lg[m])) return {cand, m};
  }
  throw NonConvergence("waterfill: window classification failed");
}

}  // namespace

Allocation allocate(const std::vector<double>& sorted_variances, double total_rate) {
  const Level lvl = solve(sorted_variances, total_rate);
  Allocation out;
  out.water_level = std::exp2(lvl.log2_lambda);
  out.active_blocks = lvl.active;
  out.rates.resize(sorted_variances.size(), 0.0);
  for (int j = 0; j < lvl.active; ++j)
    out.rates[j] = std::max(std::log2(sorted_variances[j]) - lvl.log2_lambda, 0.0);
  return out;
}

double distortion_sum(const std::vector<double>& sorted_variances, double total_rate) {
  const Level lvl = solve(sorted_variances, total_rate);
  double d = lvl.active * std::exp2(lvl.log2_lambda);
  for (size_t j = lvl.active; j < sorted_variances.size(); ++j)
    d += sorted_variances[j];
  return d;
}

}  // namespace qsfl::waterfill
