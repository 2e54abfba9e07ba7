#pragma once

#include <vector>

#include "qsfl/model.hpp"

namespace qsfl::scorpa {

// Per-frame channel-gain thresholds of the jointly optimal source/channel
// rate and power policy, one entry per window m = 1..K:
//   d1[m], d2[m]: window of m active blocks (d2[m] is d1[m+1]; d2[K] = inf)
//   c[m]:         saturation onset inside window m (inf when unbuffered)
//   a1/a2:        saturated slice [max(d1,c), max(d2,c)]
//   e1/e2:        unsaturated slice [d1, max(min(c,d2), d1)]
struct ScorpaRegions {
  std::vector<double> c, d1, d2, a1, a2, e1, e2;
};

// Solved Lagrange multiplier of the average-power constraint. The multiplier
// itself can sit far below double range at high power with a finite buffer
// (it scales like exp(-P/(2^(B/b)-1))), so the log is authoritative and
// lambda may underflow to zero.
struct ScorpaSolution {
  double lambda = 0.0;
  double log_lambda = 0.0;
  double achieved_power = 0.0;
  bool solved = false;
};

// Region boundaries at a given multiplier (lambda > 0, linear scale).
ScorpaRegions regions(const FrameState& frame, double lambda, const SystemConfig& cfg);

// Multiplier meeting the average-power constraint E[gamma] = P_bar, bisected
// on log(lambda) with an adaptive bracket. Throws BracketingFailure when no
// sign change can be found.
ScorpaSolution solve_lambda(const SourceModel& source, const SystemConfig& cfg);

// Closed-form E[gamma] at a given log-multiplier.
double expected_power(const SourceModel& source, const SystemConfig& cfg,
                      double log_lambda);

// Rate/power decision for one frame and channel gain. Throws UnsolvedLambda
// when sol.solved is false.
PolicyDecision policy(const FrameState& frame, double alpha,
                      const ScorpaSolution& sol, const SystemConfig& cfg);

// Closed-form mean distortion per source sample under the solved policy.
double mean_distortion(const SourceModel& source, const SystemConfig& cfg,
                       const ScorpaSolution& sol);

// Ascending finite quadrature breakpoints (region edges plus a log-spaced
// tail ladder) for the oracle integrators.
std::vector<double> quadrature_breakpoints(const FrameState& frame,
                                           const ScorpaSolution& sol,
                                           const SystemConfig& cfg);

}  // namespace qsfl::scorpa
