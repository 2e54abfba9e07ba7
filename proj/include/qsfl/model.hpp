#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qsfl/errors.hpp"

namespace qsfl {

// Discrete-state variance model of the quasi-stationary source. States are
// i.i.d. across the blocks of a frame.
struct SourceModel {
  int num_states = 0;
  std::vector<double> variances;  // sigma^2 per state, > 0
  std::vector<double> pmf;        // same length, sums to 1

  // E_s[sigma^2]
  double mean_variance() const;

  // Throws ConfigError unless sizes match, variances are positive and the
  // pmf is a probability vector (1e-9 sum slack).
  void validate() const;
};

// Nine-state uniform source: variances 1..65, pmf 1/9 each.
SourceModel make_source_u();

// Nine-state source with pmf proportional to exp(-(s - 5.49)^2 / 5.04)
// over the same variances as the uniform source.
SourceModel make_source_g();

// Degenerate single-state source with variance 23.66.
SourceModel make_source_d();

// System-level operating point shared by every scheme.
struct SystemConfig {
  int frame_blocks = 1;          // K, blocks per frame
  double bandwidth_ratio = 1.0;  // b, channel uses per source sample, >= 1
  double buffer_cap =            // B_max, bits per block; +inf when unbounded
      std::numeric_limits<double>::infinity();
  double avg_power = 1.0;        // P_bar, linear scale

  bool buffer_finite() const { return std::isfinite(buffer_cap); }
  double bk() const { return bandwidth_ratio * frame_blocks; }

  void validate() const;  // ConfigError on violations
};

// One realization of the per-frame state vector.
struct FrameState {
  std::vector<int> states;               // drawn state indices, frame order
  std::vector<double> sorted_variances;  // descending
  double probability = 0.0;
};

struct FrameEnumOptions {
  long long cap = 1000000;  // throw CapExceeded beyond this many frames
  bool merge = false;       // collapse permutations into one weighted frame
};

// All N^K state combinations with product probabilities. With merge set,
// frames sharing a variance multiset are combined (probabilities summed,
// representative states kept), which preserves every permutation-invariant
// expectation.
std::vector<FrameState> enumerate_frames(const SourceModel& source, int frame_blocks,
                                         const FrameEnumOptions& opts = {});

// Rayleigh block fading: channel power gain density exp(-a) on [0, inf).
double channel_gain_density(double alpha);

// Per-frame transmission decision: source rates aligned with
// sorted_variances (bits per sample), channel rate in bits per channel use,
// transmit power gamma.
struct PolicyDecision {
  std::vector<double> source_rates;
  double channel_rate = 0.0;
  double power = 0.0;
};

// Parsed top-level JSON configuration document. Recognized keys:
//   source: "U" | "G" | "D" | {variances: [...], pmf: [...]}
//   K: integer >= 1
//   b: number >= 1
//   B_max: positive number or "inf"
//   P_bar_dB: number
//   seed: optional unsigned integer (default 0)
struct ParsedConfig {
  SourceModel source;
  SystemConfig cfg;
  double p_bar_dB = 0.0;  // as supplied; cfg.avg_power = 10^(p_bar_dB/10)
  unsigned long long seed = 0;
};

ParsedConfig parse_config(const std::string& json_text);

// FNV-1a digest of the canonicalized configuration, as 16 hex characters.
std::string config_digest(const ParsedConfig& parsed);

}  // namespace qsfl
