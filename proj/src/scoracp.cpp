#include "qsfl/scoracp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsfl/special.hpp"
#include "qsfl/waterfill.hpp"

namespace qsfl::scoracp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Window geometry in x = 1 + alpha*P_bar coordinates, where the thresholds
// x1[m] = (prod var_{1..m})^(1/bK) / var_m^(m/bK) are power-independent.
struct FrameGeom {
  int k = 0;
  double bk = 0.0;
  std::vector<double> s;     // prefix sums of ln var (descending), s[0] = 0
  std::vector<double> tail;  // tail[m] = sum of variances after the first m
  std::vector<double> x1;    // 1-based thresholds, index m-1; x1[0] = 1
  double x_sat = kInf;       // 2^(B/b)
  double sat_distortion = 0.0;
};

FrameGeom make_geom(const FrameState& frame, const SystemConfig& cfg) {
  FrameGeom g;
  g.k = static_cast<int>(frame.sorted_variances.size());
  if (g.k == 0) throw EmptyFrame("scoracp: empty frame");
  g.bk = cfg.bk();
  g.s.resize(g.k + 1, 0.0);
  g.tail.resize(g.k + 1, 0.0);
  for (int j = 0; j < g.k; ++j)
    g.s[j + 1] = g.s[j] + std::log(frame.sorted_variances[j]);
  for (int j = g.k - 1; j >= 0; --j)
    g.tail[j] = g.tail[j + 1] + frame.sorted_variances[j];
  g.x1.resize(g.k);
  for (int m = 1; m <= g.k; ++m)
    g.x1[m - 1] =
        std::exp((g.s[m] - m * std::log(frame.sorted_variances[m - 1])) / g.bk);
  if (cfg.buffer_finite()) {
    g.x_sat = std::exp2(cfg.buffer_cap / cfg.bandwidth_ratio);
    g.sat_distortion = waterfill::distortion_sum(
        frame.sorted_variances, cfg.frame_blocks * cfg.buffer_cap);
  }
  return g;
}

// E[sum_j var_j 2^(-R_j) | frame], not yet divided by K. Each window m
// contributes a generalized-exponential-integral slice for the m active
// blocks plus the untouched tail variances.
double frame_distortion(const FrameGeom& g, double p_bar) {
  const double inv_p = 1.0 / p_bar;
  double acc = 0.0;
  for (int m = 1; m <= g.k; ++m) {
    const double xa = g.x1[m - 1];
    if (xa >= g.x_sat) break;
    const double xb = std::min((m < g.k) ? g.x1[m] : kInf, g.x_sat);
    const double p = g.bk / m;
    const double pref = m * std::exp(g.s[m] / m) * inv_p * std::exp(inv_p);
    auto slice = [&](double x) -> double {
      if (std::isinf(x)) return 0.0;
      return std::exp((1.0 - p) * std::log(x)) * special::exp_int(p, x * inv_p);
    };
    acc += pref * (slice(xa) - slice(xb));
    acc += g.tail[m] * special::exp_diff((xa - 1.0) * inv_p, (xb - 1.0) * inv_p);
  }
  if (std::isfinite(g.x_sat))
    acc += g.sat_distortion * std::exp(-(g.x_sat - 1.0) * inv_p);
  return acc;
}

}  // namespace

ScoracpRegions regions(const FrameState& frame, const SystemConfig& cfg) {
  cfg.validate();
  const FrameGeom g = make_geom(frame, cfg);
  ScoracpRegions r;
  r.c = std::isfinite(g.x_sat) ? (g.x_sat - 1.0) / cfg.avg_power : kInf;
  r.d1.resize(g.k);
  r.d2.resize(g.k);
  for (int m = 0; m < g.k; ++m)
    r.d1[m] = (g.x1[m] - 1.0) / cfg.avg_power;
  for (int m = 0; m < g.k - 1; ++m) r.d2[m] = r.d1[m + 1];
  r.d2[g.k - 1] = kInf;
  return r;
}

PolicyDecision policy(const FrameState& frame, double alpha,
                      const SystemConfig& cfg) {
  cfg.validate();
  if (!(alpha >= 0.0)) throw DomainError("scoracp::policy: alpha must be >= 0");
  const double rate_cap = cfg.buffer_cap / cfg.bandwidth_ratio;
  const double channel_rate =
      std::min(std::log1p(alpha * cfg.avg_power) / 0.6931471805599453, rate_cap);
  const double total = cfg.bk() * channel_rate;
  PolicyDecision out;
  out.source_rates = waterfill::allocate(frame.sorted_variances, total).rates;
  out.channel_rate = channel_rate;
  out.power = cfg.avg_power;
  return out;
}

double mean_distortion(const SourceModel& source, const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  double acc = 0.0;
  for (const auto& f : frames)
    acc += f.probability * frame_distortion(make_geom(f, cfg), cfg.avg_power);
  return acc / cfg.frame_blocks;
}

ScoracpConstants asymptotic_constants(const SourceModel& source,
                                      const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  const double b = cfg.bandwidth_ratio;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  ScoracpConstants out;
  out.v_m = (b > 1.0) ? 0.0 : nan;
  out.w_m = (b == 1.0) ? 0.0 : nan;
  for (const auto& f : frames) {
    const FrameGeom g = make_geom(f, cfg);
    double inner = 0.0;
    for (int m = 1; m < g.k; ++m) {
      const double p = g.bk / m;
      inner += m * std::exp(g.s[m] / m) *
                   (std::pow(g.x1[m - 1], 1.0 - p) - std::pow(g.x1[m], 1.0 - p)) /
                   (p - 1.0) +
               (g.x1[m] - g.x1[m - 1]) * g.tail[m];
    }
    const double head = g.k * std::exp(g.s[g.k] / g.k);
    if (b > 1.0)
      out.v_m += f.probability *
                 (inner + head * std::pow(g.x1[g.k - 1], 1.0 - b) / (b - 1.0));
    if (b == 1.0)
      out.w_m += f.probability *
                 (inner + head * special::exp_int(
                                     1.0, g.x1[g.k - 1] / cfg.avg_power));
  }
  out.v_m /= cfg.frame_blocks;
  out.w_m /= cfg.frame_blocks;
  return out;
}

std::vector<double> quadrature_breakpoints(const FrameState& frame,
                                           const SystemConfig& cfg) {
  const ScoracpRegions r = regions(frame, cfg);
  std::vector<double> pts;
  for (double d : r.d1)
    if (d > 0.0 && std::isfinite(d)) pts.push_back(d);
  if (std::isfinite(r.c)) pts.push_back(r.c);
  double base = 1e-3;
  for (const double p : pts) base = std::max(base, p);
  for (double x = base; x < 40.0; x *= 10.0) pts.push_back(x);
  pts.push_back(40.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace qsfl::scoracp
