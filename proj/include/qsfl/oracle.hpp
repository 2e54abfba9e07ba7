#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qsfl/model.hpp"
#include "qsfl/quadrature.hpp"

namespace qsfl::oracle {

// Scheme-agnostic policy handle: everything the oracles need to evaluate a
// transmission strategy from the outside. breakpoints lists the finite
// channel gains where the per-frame decision changes character, so the
// integrator can split there.
struct SchemePolicy {
  std::string name;
  std::function<PolicyDecision(const FrameState&, double)> decide;
  std::function<std::vector<double>(const FrameState&)> breakpoints;
};

// Realized per-sample distortion of one decision, applying the outage rule:
// a frame whose source rates exceed the channel's capacity at gain alpha
// delivers nothing and keeps the full source variance.
double realized_distortion(const FrameState& frame, const PolicyDecision& d,
                           double alpha, const SystemConfig& cfg);

// Mean distortion by adaptive quadrature against the channel gain density,
// frame by frame. Independent of every closed form in the scheme modules.
double quadrature_distortion(const SchemePolicy& policy, const SourceModel& source,
                             const SystemConfig& cfg,
                             const quadrature::QuadratureOptions& opts = {});

struct McConfig {
  long long trials = 1000000;
  std::uint64_t seed = 0;
  int batch = 4096;  // trials per partial sum; part of the rounding contract
};

struct McReport {
  double mean_distortion = 0.0;
  double std_error = 0.0;  // standard error of mean_distortion
  double mean_power = 0.0;
  double std_error_power = 0.0;
  double outage_rate = 0.0;
};

// Monte Carlo evaluation with counter-based per-trial streams: results are
// bit-identical for a given (seed, trials, batch) regardless of thread
// count (QSFL_THREADS). Batches reduce by a pairwise tree.
McReport simulate(const SchemePolicy& policy, const SourceModel& source,
                  const SystemConfig& cfg, const McConfig& mc = {});

}  // namespace qsfl::oracle
