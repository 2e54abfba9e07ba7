#include "qsfl/asymptotics.hpp"

#include <cmath>

#include "qsfl/copacr.hpp"
#include "qsfl/crcp.hpp"
#include "qsfl/scoracp.hpp"
#include "qsfl/waterfill.hpp"

namespace qsfl::asymptotics {
namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// E[(prod var)^(1/root)] over frames.
double mean_geo_power(const SourceModel& source, int frame_blocks, double root) {
  const auto frames = enumerate_frames(source, frame_blocks);
  double acc = 0.0;
  for (const auto& f : frames) {
    double s = 0.0;
    for (double v : f.sorted_variances) s += std::log(v);
    acc += f.probability * std::exp(s / root);
  }
  return acc;
}

double optimal_rate(SchemeKind scheme, const SourceModel& source,
                    const SystemConfig& cfg) {
  if (scheme == SchemeKind::copacr) return copacr::optimize_rate(source, cfg).rate_star;
  if (scheme == SchemeKind::crcp) return crcp::optimize_rate(source, cfg).rate_star;
  throw DomainError("fit_multiplexing_gain: only COPACR and CRCP carry a rate fit");
}

}  // namespace

double saturation_distortion(const SourceModel& source, int frame_blocks,
                             double buffer_cap) {
  source.validate();
  if (frame_blocks < 1)
    throw ConfigError("saturation_distortion: K must be >= 1");
  if (!(buffer_cap > 0.0))
    throw ConfigError("saturation_distortion: buffer cap must be positive");
  if (!std::isfinite(buffer_cap)) return 0.0;
  const auto frames = enumerate_frames(source, frame_blocks);
  double acc = 0.0;
  for (const auto& f : frames)
    acc += f.probability *
           waterfill::distortion_sum(f.sorted_variances, frame_blocks * buffer_cap);
  return acc / frame_blocks;
}

std::vector<double> default_fit_grid(SchemeKind scheme) {
  std::vector<double> grid;
  const double lo = (scheme == SchemeKind::crcp) ? 40.0 : 30.0;
  for (double p = lo; p <= 60.0 + 1e-9; p += 2.0) grid.push_back(p);
  return grid;
}

FitResult fit_multiplexing_gain(SchemeKind scheme, const SourceModel& source,
                                const SystemConfig& cfg_sans_power,
                                const std::vector<double>& grid_dB) {
  source.validate();
  if (grid_dB.size() < 8)
    throw DomainError("fit_multiplexing_gain: needs at least 8 grid points");
  std::vector<double> xs, ys;
  xs.reserve(grid_dB.size());
  ys.reserve(grid_dB.size());
  SystemConfig cfg = cfg_sans_power;
  for (double db : grid_dB) {
    cfg.avg_power = db_to_linear(db);
    xs.push_back(std::log2(cfg.avg_power));
    ys.push_back(optimal_rate(scheme, source, cfg));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  FitResult fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.slope * xs[i] + fit.intercept);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.fit_range_dB = {grid_dB.front(), grid_dB.back()};
  return fit;
}

double estimate_exponent(SchemeKind scheme, const SourceModel& source,
                         const SystemConfig& cfg_sans_power, BufferMode mode,
                         double probe_a_dB, double probe_b_dB) {
  SystemConfig cfg = cfg_sans_power;
  if (mode == BufferMode::unbounded)
    cfg.buffer_cap = std::numeric_limits<double>::infinity();
  cfg.avg_power = db_to_linear(probe_a_dB);
  const double da = evaluate_scheme(scheme, source, cfg).mean_distortion;
  const double pa = cfg.avg_power;
  cfg.avg_power = db_to_linear(probe_b_dB);
  const double db = evaluate_scheme(scheme, source, cfg).mean_distortion;
  return -(std::log(db) - std::log(da)) / (std::log(cfg.avg_power) - std::log(pa));
}

GainReport power_gain_formula(GainKind which, const SourceModel& source,
                              const SystemConfig& cfg_sans_power, double p2_linear,
                              const FitResult* copacr_fit,
                              const FitResult* crcp_fit) {
  source.validate();
  if (!(p2_linear > 0.0))
    throw DomainError("power_gain_formula: p2 must be positive");
  const double b = cfg_sans_power.bandwidth_ratio;
  const int k = cfg_sans_power.frame_blocks;
  const double p2 = p2_linear;
  const double es = source.mean_variance();
  const double geo_k = mean_geo_power(source, k, static_cast<double>(k));

  GainReport rep;
  rep.which = which;
  rep.p2_dB = 10.0 * std::log10(p2);

  if (which == GainKind::g1 || which == GainKind::g2) {
    if (!copacr_fit)
      throw MissingFit("power_gain_formula: COPACR fit required for G1/G2");
  } else if (!crcp_fit) {
    throw MissingFit("power_gain_formula: CRCP fit required for G3");
  }

  switch (which) {
    case GainKind::g1: {
      const double r1 = copacr_fit->slope, r0 = copacr_fit->intercept;
      const double geo_kbk = mean_geo_power(source, k, k * (1.0 + b));
      const double gam = std::tgamma(1.0 / (b + 1.0));
      rep.gain_dB = 10.0 / b *
                    std::log10(geo_k * std::pow(p2, b * (1.0 - r1)) *
                               std::exp2(-b * r0) /
                               (std::pow(gam, b + 1.0) * std::pow(geo_kbk, b + 1.0)));
      rep.simplified_gain_dB = (1.0 - r1) * rep.p2_dB;
      break;
    }
    case GainKind::g2: {
      const double r1 = copacr_fit->slope, r0 = copacr_fit->intercept;
      SystemConfig cfg = cfg_sans_power;
      cfg.avg_power = p2;
      const auto cs = scoracp::asymptotic_constants(source, cfg);
      if (b == 1.0)
        rep.gain_dB = 10.0 / r1 *
                      std::log10(cs.w_m / (geo_k * std::pow(p2, 1.0 - r1) *
                                           std::exp2(-r0)));
      else
        rep.gain_dB = 10.0 / (b * r1) *
                      std::log10(cs.v_m / (geo_k * std::pow(p2, 1.0 - b * r1) *
                                           std::exp2(-b * r0)));
      rep.simplified_gain_dB = (b * r1 - 1.0) / (b * r1) * rep.p2_dB;
      break;
    }
    case GainKind::g3: {
      const double rt0 = crcp_fit->intercept;
      SystemConfig cfg = cfg_sans_power;
      cfg.avg_power = p2;
      const auto cs = scoracp::asymptotic_constants(source, cfg);
      if (b == 1.0)
        rep.gain_dB =
            20.0 * std::log10(cs.w_m / std::sqrt(p2) /
                              (std::exp2(-rt0) * geo_k + std::exp2(rt0) * es));
      else
        rep.gain_dB =
            (b + 1.0) / b * 10.0 *
            std::log10(cs.v_m * std::pow(p2, -1.0 / (b + 1.0)) /
                       (std::exp2(-b * rt0) * geo_k + std::exp2(rt0) * es));
      rep.simplified_gain_dB = -rep.p2_dB / b;
      break;
    }
  }
  return rep;
}

double power_gain_empirical(SchemeKind scheme1, SchemeKind scheme2,
                            double target_rsnr_dB, const SourceModel& source,
                            const SystemConfig& cfg_sans_power) {
  source.validate();
  // Invert RSNR(P) for one scheme by bisection on the power in dB. RSNR is
  // nondecreasing in power; with a finite buffer it is capped by the
  // saturation floor.
  auto invert = [&](SchemeKind scheme) -> double {
    if (cfg_sans_power.buffer_finite()) {
      const double floor_d = saturation_distortion(
          source, cfg_sans_power.frame_blocks, cfg_sans_power.buffer_cap);
      if (target_rsnr_dB >= rsnr_dB(source, floor_d) - 1e-9)
        throw Unachievable(
            "power_gain_empirical: target RSNR at or above the buffer cap");
    }
    SystemConfig cfg = cfg_sans_power;
    auto rsnr_at = [&](double p_dB) {
      cfg.avg_power = db_to_linear(p_dB);
      return evaluate_scheme(scheme, source, cfg).rsnr_dB;
    };
    double lo = -60.0, hi = 90.0;
    if (rsnr_at(hi) < target_rsnr_dB)
      throw Unachievable("power_gain_empirical: target RSNR beyond search range");
    if (rsnr_at(lo) > target_rsnr_dB)
      throw Unachievable("power_gain_empirical: target RSNR below search range");
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (rsnr_at(mid) < target_rsnr_dB)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  return invert(scheme2) - invert(scheme1);
}

}  // namespace qsfl::asymptotics
