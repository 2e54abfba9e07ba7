#pragma once

#include <string_view>

#include "qsfl/model.hpp"
#include "qsfl/oracle.hpp"

namespace qsfl {

enum class SchemeKind { scorpa, copacr, scoracp, crcp };

std::string_view to_string(SchemeKind kind);
SchemeKind scheme_from_string(std::string_view name);  // ConfigError on unknown

// Closed-form evaluation of one scheme at one operating point, with the
// scheme-specific diagnostics that exist for it (NaN elsewhere).
struct SchemeReport {
  SchemeKind scheme = SchemeKind::scorpa;
  double mean_distortion = 0.0;
  double rsnr_dB = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double log_lambda = std::numeric_limits<double>::quiet_NaN();
  double achieved_power = std::numeric_limits<double>::quiet_NaN();
  double rate_star = std::numeric_limits<double>::quiet_NaN();
  double threshold_q = std::numeric_limits<double>::quiet_NaN();
  double outage_alpha = std::numeric_limits<double>::quiet_NaN();
  bool grid_unimodal = true;
};

SchemeReport evaluate_scheme(SchemeKind kind, const SourceModel& source,
                             const SystemConfig& cfg);

// Policy handle for the oracles; solves the scheme's operating point first.
oracle::SchemePolicy make_scheme_policy(SchemeKind kind, const SourceModel& source,
                                        const SystemConfig& cfg);

// Reconstruction SNR 10*log10(E_s[var] / E[D]).
double rsnr_dB(const SourceModel& source, double mean_distortion);

}  // namespace qsfl
