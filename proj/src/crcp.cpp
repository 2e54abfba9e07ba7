#include "qsfl/crcp.hpp"

#include <cmath>

#include "qsfl/waterfill.hpp"
#include "rate_search.hpp"

namespace qsfl::crcp {
namespace {

double distortion_at_rate(double rate, const std::vector<FrameState>& frames,
                          const SourceModel& source, const SystemConfig& cfg) {
  if (rate == 0.0) return source.mean_variance();
  const double t = (std::exp2(rate) - 1.0) / cfg.avg_power;
  double wf = 0.0;
  for (const auto& f : frames)
    wf += f.probability *
          waterfill::distortion_sum(
              f.sorted_variances, cfg.frame_blocks * cfg.bandwidth_ratio * rate);
  wf /= cfg.frame_blocks;
  return source.mean_variance() * (-std::expm1(-t)) + std::exp(-t) * wf;
}

}  // namespace

double mean_distortion_given_rate(double rate, const SourceModel& source,
                                  const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  if (!(rate >= 0.0)) throw DomainError("crcp: rate must be >= 0");
  if (cfg.bandwidth_ratio * rate > cfg.buffer_cap + 1e-12)
    throw RateOverBuffer("crcp: b*R exceeds the buffer cap");
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  return distortion_at_rate(rate, frames, source, cfg);
}

CrcpSolution optimize_rate(const SourceModel& source, const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  const double r_hi = std::min(cfg.buffer_cap / cfg.bandwidth_ratio,
                               std::log2(1.0 + 10.0 * cfg.avg_power));
  const auto result = detail::minimize_rate(
      [&](double r) { return distortion_at_rate(r, frames, source, cfg); }, 0.0,
      r_hi);
  CrcpSolution sol;
  sol.rate_star = result.rate;
  sol.mean_distortion = result.value;
  sol.grid_unimodal = result.grid_unimodal;
  sol.outage_alpha = (std::exp2(result.rate) - 1.0) / cfg.avg_power;
  return sol;
}

double mean_distortion(const CrcpSolution& sol, const SourceModel& source,
                       const SystemConfig& cfg) {
  return mean_distortion_given_rate(sol.rate_star, source, cfg);
}

}  // namespace qsfl::crcp
