#pragma once

#include <vector>

#include "qsfl/model.hpp"

namespace qsfl::scoracp {

// Constant transmit power (gamma = P_bar) with rate adaptation: the frame
// buffer is filled to min(K*b*log2(1 + alpha*P_bar), K*B_max) bits and
// reverse water-filled across blocks.
//
// Per-frame gain thresholds: d1[m], d2[m] bound the window with m active
// blocks (d1[1] = 0, d2[m] = d1[m+1], d2[K] = inf), c is the saturation
// onset (inf when unbuffered).
struct ScoracpRegions {
  double c = 0.0;
  std::vector<double> d1, d2;
};

ScoracpRegions regions(const FrameState& frame, const SystemConfig& cfg);

PolicyDecision policy(const FrameState& frame, double alpha, const SystemConfig& cfg);

// Closed-form mean distortion per sample.
double mean_distortion(const SourceModel& source, const SystemConfig& cfg);

// Leading coefficients of the high-power expansion E[D] ~ const / P_bar:
// v_m applies for b > 1 (pure constant), w_m for b = 1 (carries a slow
// ln(P_bar) term through E_1, so it is evaluated at cfg.avg_power). The
// inapplicable one is NaN.
struct ScoracpConstants {
  double v_m = 0.0;
  double w_m = 0.0;
};

ScoracpConstants asymptotic_constants(const SourceModel& source,
                                      const SystemConfig& cfg);

// Ascending finite quadrature breakpoints for the oracle integrators.
std::vector<double> quadrature_breakpoints(const FrameState& frame,
                                           const SystemConfig& cfg);

}  // namespace qsfl::scoracp
