#pragma once

#include <utility>
#include <vector>

#include "qsfl/model.hpp"
#include "qsfl/schemes.hpp"

namespace qsfl::asymptotics {

// Distortion floor of a finite buffer: every scheme converges to the mean
// water-filled distortion at full buffers as power grows.
double saturation_distortion(const SourceModel& source, int frame_blocks,
                             double buffer_cap);

// Least-squares line R*(P) = r1 * log2(P) + r0 for the rate-optimizing
// schemes (COPACR and CRCP only; DomainError otherwise).
struct FitResult {
  double slope = 0.0;      // r1, the multiplexing gain
  double intercept = 0.0;  // r0
  double residual = 0.0;   // RMS of the fit residuals
  std::pair<double, double> fit_range_dB = {0.0, 0.0};
};

FitResult fit_multiplexing_gain(SchemeKind scheme, const SourceModel& source,
                                const SystemConfig& cfg_sans_power,
                                const std::vector<double>& grid_dB);

// Default fit grids: 30..60 dB for COPACR, 40..60 dB for CRCP, 2 dB steps.
std::vector<double> default_fit_grid(SchemeKind scheme);

enum class BufferMode { from_config, unbounded };

// Mean-distortion exponent -d log(E[D]) / d log(P) estimated by a two-point
// probe (default 50 and 60 dB).
double estimate_exponent(SchemeKind scheme, const SourceModel& source,
                         const SystemConfig& cfg_sans_power, BufferMode mode,
                         double probe_a_dB = 50.0, double probe_b_dB = 60.0);

enum class GainKind { g1, g2, g3 };

// Asymptotic power gain of scheme 1 over scheme 2 at mean-distortion parity,
// where scheme 2 operates at p2: G1 = SCORPA vs COPACR, G2 = COPACR vs
// SCORACP, G3 = CRCP vs SCORACP. simplified_gain_dB is the large-power
// limit that depends only on the fitted slope.
struct GainReport {
  GainKind which = GainKind::g1;
  double gain_dB = 0.0;
  double p2_dB = 0.0;
  double simplified_gain_dB = 0.0;
};

// Exact-formula gain. Needs the COPACR fit for G1/G2 and the CRCP fit for
// G3 (MissingFit when the required one is absent).
GainReport power_gain_formula(GainKind which, const SourceModel& source,
                              const SystemConfig& cfg_sans_power, double p2_linear,
                              const FitResult* copacr_fit,
                              const FitResult* crcp_fit);

// Curve-based gain: horizontal distance between the two schemes' RSNR
// curves at the target RSNR, found by inverting each curve in power.
// Throws Unachievable when a scheme cannot reach the target.
double power_gain_empirical(SchemeKind scheme1, SchemeKind scheme2,
                            double target_rsnr_dB, const SourceModel& source,
                            const SystemConfig& cfg_sans_power);

}  // namespace qsfl::asymptotics
