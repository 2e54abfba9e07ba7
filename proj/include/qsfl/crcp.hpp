#pragma once

#include "qsfl/model.hpp"

namespace qsfl::crcp {

// Constant rate and constant power baseline: transmit at fixed R with
// gamma = P_bar regardless of the gain; outage whenever the channel cannot
// carry R.
struct CrcpSolution {
  double rate_star = 0.0;      // bits per channel use
  double outage_alpha = 0.0;   // (2^R - 1)/P_bar
  double mean_distortion = 0.0;
  bool grid_unimodal = true;
};

// Mean distortion at a fixed rate: outage weight carries the raw variance,
// the complement gets the water-filled buffer K*b*R.
// Throws RateOverBuffer when b*R exceeds B_max.
double mean_distortion_given_rate(double rate, const SourceModel& source,
                                  const SystemConfig& cfg);

// Grid + golden-section rate search on [0, min(B_max/b, log2(1 + 10 p_bar))].
CrcpSolution optimize_rate(const SourceModel& source, const SystemConfig& cfg);

// Recompute the closed-form mean distortion of a solved operating point.
double mean_distortion(const CrcpSolution& sol, const SourceModel& source,
                       const SystemConfig& cfg);

}  // namespace qsfl::crcp
