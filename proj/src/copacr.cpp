#include "qsfl/copacr.hpp"

#include <cmath>
#include <limits>

#include "qsfl/special.hpp"
#include "qsfl/waterfill.hpp"
#include "rate_search.hpp"

namespace qsfl::copacr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mean water-filled distortion per sample when the frame buffer carries
// total_bits across the enumerated frames.
double mean_waterfill(const std::vector<FrameState>& frames, double total_bits,
                      int frame_blocks) {
  double acc = 0.0;
  for (const auto& f : frames)
    acc += f.probability * waterfill::distortion_sum(f.sorted_variances, total_bits);
  return acc / frame_blocks;
}

double distortion_at_rate(double rate, const std::vector<FrameState>& frames,
                          const SourceModel& source, const SystemConfig& cfg) {
  if (rate == 0.0) return source.mean_variance();
  const double g = std::exp2(rate) - 1.0;
  const double q = solve_threshold(rate, cfg.avg_power);
  const double t = std::isinf(q) ? 0.0 : g / q;  // outage threshold on alpha
  const double wf =
      mean_waterfill(frames, cfg.frame_blocks * cfg.bandwidth_ratio * rate,
                     cfg.frame_blocks);
  // Outage mass carries the raw variance; exp(-t) is kept separate from
  // -expm1(-t) so a near-zero outage costs no precision.
  return source.mean_variance() * (-std::expm1(-t)) + std::exp(-t) * wf;
}

}  // namespace

double solve_threshold(double rate, double p_bar) {
  if (!(rate > 0.0)) throw DomainError("copacr::solve_threshold: rate must be > 0");
  if (!(p_bar > 0.0)) throw DomainError("copacr::solve_threshold: power must be > 0");
  const double g = std::exp2(rate) - 1.0;
  const double target = p_bar / g;  // solve E_1(t) = target, then q = g/t
  // Deep regime: E_1(t) = -euler_gamma - ln(t) to double precision, so the
  // root is analytic; g/t may overflow to +inf, which is the honest answer.
  if (target > 68.0)
    return g * std::exp(target + special::euler_gamma);
  double lo = -70.0, hi = 10.0;  // bisect on ln(t); E_1 is decreasing
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double val = special::exp_int1_log(mid);
    if (std::abs(val - target) <= 1e-12 * target) break;
    if (val > target)
      lo = mid;
    else
      hi = mid;
  }
  return g * std::exp(-mid);
}

double mean_distortion_given_rate(double rate, const SourceModel& source,
                                  const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  if (!(rate >= 0.0)) throw DomainError("copacr: rate must be >= 0");
  if (cfg.bandwidth_ratio * rate > cfg.buffer_cap + 1e-12)
    throw RateOverBuffer("copacr: b*R exceeds the buffer cap");
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  return distortion_at_rate(rate, frames, source, cfg);
}

CopacrSolution optimize_rate(const SourceModel& source, const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  const double r_hi = std::min(cfg.buffer_cap / cfg.bandwidth_ratio,
                               std::log2(1.0 + 10.0 * cfg.avg_power));
  const auto result = detail::minimize_rate(
      [&](double r) { return distortion_at_rate(r, frames, source, cfg); }, 0.0,
      r_hi);
  CopacrSolution sol;
  sol.rate_star = result.rate;
  sol.mean_distortion = result.value;
  sol.grid_unimodal = result.grid_unimodal;
  if (result.rate > 0.0) {
    sol.threshold_q = solve_threshold(result.rate, cfg.avg_power);
    sol.outage_alpha = std::isinf(sol.threshold_q)
                           ? 0.0
                           : (std::exp2(result.rate) - 1.0) / sol.threshold_q;
  } else {
    sol.threshold_q = kInf;
    sol.outage_alpha = 0.0;
  }
  return sol;
}

}  // namespace qsfl::copacr
