#include "qsfl/schemes.hpp"

#include <cmath>

#include "qsfl/copacr.hpp"
#include "qsfl/crcp.hpp"
#include "qsfl/scoracp.hpp"
#include "qsfl/scorpa.hpp"
#include "qsfl/waterfill.hpp"

namespace qsfl {

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::scorpa: return "scorpa";
    case SchemeKind::copacr: return "copacr";
    case SchemeKind::scoracp: return "scoracp";
    case SchemeKind::crcp: return "crcp";
  }
  return "?";
}

SchemeKind scheme_from_string(std::string_view name) {
  if (name == "scorpa") return SchemeKind::scorpa;
  if (name == "copacr") return SchemeKind::copacr;
  if (name == "scoracp") return SchemeKind::scoracp;
  if (name == "crcp") return SchemeKind::crcp;
  throw ConfigError("unknown scheme '" + std::string(name) +
                    "' (expected scorpa, copacr, scoracp or crcp)");
}

double rsnr_dB(const SourceModel& source, double mean_distortion) {
  if (!(mean_distortion > 0.0))
    throw DomainError("rsnr_dB: mean distortion must be positive");
  return 10.0 * std::log10(source.mean_variance() / mean_distortion);
}

SchemeReport evaluate_scheme(SchemeKind kind, const SourceModel& source,
                             const SystemConfig& cfg) {
  SchemeReport rep;
  rep.scheme = kind;
  switch (kind) {
    case SchemeKind::scorpa: {
      const auto sol = scorpa::solve_lambda(source, cfg);
      rep.mean_distortion = scorpa::mean_distortion(source, cfg, sol);
      rep.lambda = sol.lambda;
      rep.log_lambda = sol.log_lambda;
      rep.achieved_power = sol.achieved_power;
      break;
    }
    case SchemeKind::copacr: {
      const auto sol = copacr::optimize_rate(source, cfg);
      rep.mean_distortion = sol.mean_distortion;
      rep.rate_star = sol.rate_star;
      rep.threshold_q = sol.threshold_q;
      rep.outage_alpha = sol.outage_alpha;
      rep.grid_unimodal = sol.grid_unimodal;
      break;
    }
    case SchemeKind::scoracp: {
      rep.mean_distortion = scoracp::mean_distortion(source, cfg);
      break;
    }
    case SchemeKind::crcp: {
      const auto sol = crcp::optimize_rate(source, cfg);
      rep.mean_distortion = sol.mean_distortion;
      rep.rate_star = sol.rate_star;
      rep.outage_alpha = sol.outage_alpha;
      rep.grid_unimodal = sol.grid_unimodal;
      break;
    }
  }
  rep.rsnr_dB = rsnr_dB(source, rep.mean_distortion);
  return rep;
}

oracle::SchemePolicy make_scheme_policy(SchemeKind kind, const SourceModel& source,
                                        const SystemConfig& cfg) {
  oracle::SchemePolicy handle;
  handle.name = std::string(to_string(kind));
  switch (kind) {
    case SchemeKind::scorpa: {
      const auto sol = scorpa::solve_lambda(source, cfg);
      handle.decide = [sol, cfg](const FrameState& f, double a) {
        return scorpa::policy(f, a, sol, cfg);
      };
      handle.breakpoints = [sol, cfg](const FrameState& f) {
        return scorpa::quadrature_breakpoints(f, sol, cfg);
      };
      break;
    }
    case SchemeKind::copacr: {
      const auto sol = copacr::optimize_rate(source, cfg);
      handle.decide = [sol, cfg](const FrameState& f, double a) {
        PolicyDecision d;
        const int k = static_cast<int>(f.sorted_variances.size());
        d.source_rates.assign(k, 0.0);
        if (sol.rate_star > 0.0) {
          // The source is always encoded at the fixed rate; only the power
          // is truncated, so gains below the cutoff are genuine outages.
          d.source_rates =
              waterfill::allocate(f.sorted_variances, cfg.bk() * sol.rate_star)
                  .rates;
          d.channel_rate = sol.rate_star;
          if (a > 0.0 && a >= sol.outage_alpha)
            d.power = (std::exp2(sol.rate_star) - 1.0) / a;
        }
        return d;
      };
      handle.breakpoints = [sol](const FrameState&) {
        std::vector<double> pts{1e-3, 1.0, 10.0, 40.0};
        if (sol.outage_alpha > 0.0) pts.push_back(sol.outage_alpha);
        return pts;
      };
      break;
    }
    case SchemeKind::scoracp: {
      handle.decide = [cfg](const FrameState& f, double a) {
        return scoracp::policy(f, a, cfg);
      };
      handle.breakpoints = [cfg](const FrameState& f) {
        return scoracp::quadrature_breakpoints(f, cfg);
      };
      break;
    }
    case SchemeKind::crcp: {
      const auto sol = crcp::optimize_rate(source, cfg);
      handle.decide = [sol, cfg](const FrameState& f, double /*alpha*/) {
        PolicyDecision d;
        const int k = static_cast<int>(f.sorted_variances.size());
        d.source_rates.assign(k, 0.0);
        if (sol.rate_star > 0.0) {
          // Fixed rate and power regardless of the gain; outage happens
          // naturally below outage_alpha.
          d.source_rates =
              waterfill::allocate(f.sorted_variances, cfg.bk() * sol.rate_star)
                  .rates;
          d.channel_rate = sol.rate_star;
          d.power = cfg.avg_power;
        }
        return d;
      };
      handle.breakpoints = [sol](const FrameState&) {
        std::vector<double> pts{1e-3, 1.0, 10.0, 40.0};
        if (sol.outage_alpha > 0.0 && std::isfinite(sol.outage_alpha))
          pts.push_back(sol.outage_alpha);
        return pts;
      };
      break;
    }
  }
  return handle;
}

}  // namespace qsfl
