#pragma once

#include "qsfl/model.hpp"

namespace qsfl::copacr {

// Constant-rate transmission with truncated channel inversion: power
// gamma = (2^R - 1)/alpha above the inversion threshold, silence below it.
struct CopacrSolution {
  double rate_star = 0.0;        // bits per channel use
  double threshold_q = 0.0;      // q*: inversion cutoff parameter (may be +inf)
  double outage_alpha = 0.0;     // (2^R - 1)/q*, gain below which outage occurs
  double mean_distortion = 0.0;
  bool grid_unimodal = true;
};

// Largest inversion cutoff q whose average power meets the budget:
// (2^R - 1) * E_1((2^R - 1)/q) = p_bar, solved to 1e-9 relative. Returns
// +inf when the outage probability falls below floating-point resolution.
double solve_threshold(double rate, double p_bar);

// Mean distortion per sample at a fixed channel rate R: outage leaves the
// full source variance, otherwise the frame buffer K*b*R is water-filled.
// Throws RateOverBuffer when b*R exceeds B_max.
double mean_distortion_given_rate(double rate, const SourceModel& source,
                                  const SystemConfig& cfg);

// Grid + golden-section search of the rate minimizing mean distortion on
// [0, min(B_max/b, log2(1 + 10 p_bar))].
CopacrSolution optimize_rate(const SourceModel& source, const SystemConfig& cfg);

}  // namespace qsfl::copacr
