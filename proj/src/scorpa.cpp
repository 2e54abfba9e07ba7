#include "qsfl/scorpa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qsfl/special.hpp"
#include "qsfl/waterfill.hpp"

namespace qsfl::scorpa {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn2 = 0.6931471805599453;

// Frame geometry independent of the multiplier. All thresholds scale
// linearly with lambda, so only their log-offsets are stored:
//   ln d1[m] = u + lkd1[m],  ln c[m] = u + lkc[m],  u = ln lambda.
struct FrameGeom {
  int k = 0;
  double bk = 0.0;
  std::vector<double> lnv;    // ln variances, descending
  std::vector<double> s;      // s[m] = sum of first m lnv (s[0] = 0)
  std::vector<double> tail;   // tail[m] = sum of variances after the first m
  std::vector<double> lkd1;   // 1-based window edges, index m-1
  std::vector<double> lkc;    // saturation offsets (inf when unbuffered)
  double sat_distortion = 0;  // water-fill distortion at total rate K*B
  double g_sat = kInf;        // 2^(B/b) - 1
};

FrameGeom make_geom(const FrameState& frame, const SystemConfig& cfg) {
  FrameGeom g;
  g.k = static_cast<int>(frame.sorted_variances.size());
  if (g.k == 0) throw EmptyFrame("scorpa: empty frame");
  g.bk = cfg.bk();
  const double lbk = std::log(g.bk);
  g.lnv.resize(g.k);
  g.s.resize(g.k + 1, 0.0);
  g.tail.resize(g.k + 1, 0.0);
  for (int j = 0; j < g.k; ++j) {
    g.lnv[j] = std::log(frame.sorted_variances[j]);
    g.s[j + 1] = g.s[j] + g.lnv[j];
  }
  for (int j = g.k - 1; j >= 0; --j)
    g.tail[j] = g.tail[j + 1] + frame.sorted_variances[j];
  g.lkd1.resize(g.k);
  g.lkc.assign(g.k, kInf);
  for (int m = 1; m <= g.k; ++m)
    g.lkd1[m - 1] = (g.s[m] - (m + g.bk) * g.lnv[m - 1]) / g.bk - lbk;
  if (cfg.buffer_finite()) {
    const double rate_cap = cfg.buffer_cap / cfg.bandwidth_ratio;  // B/b
    g.g_sat = std::exp2(rate_cap) - 1.0;
    for (int m = 1; m <= g.k; ++m)
      g.lkc[m - 1] = (m + g.bk) / m * rate_cap * kLn2 - g.s[m] / m - lbk;
    g.sat_distortion = waterfill::distortion_sum(
        frame.sorted_variances, cfg.frame_blocks * cfg.buffer_cap);
  }
  return g;
}

struct WindowEdges {
  double t, ld1, ld2, lc, la1, la2, le1, le2;
};

WindowEdges window_edges(const FrameGeom& g, double u, int m) {
  WindowEdges w;
  w.t = m / (m + g.bk);
  w.ld1 = u + g.lkd1[m - 1];
  w.ld2 = (m < g.k) ? u + g.lkd1[m] : kInf;
  w.lc = std::isinf(g.lkc[m - 1]) ? kInf : u + g.lkc[m - 1];
  w.la1 = std::max(w.ld1, w.lc);
  w.la2 = std::max(w.ld2, w.lc);
  w.le1 = w.ld1;
  w.le2 = std::max(std::min(w.lc, w.ld2), w.le1);
  return w;
}

// E[gamma | frame] in closed form, evaluated entirely on log thresholds.
double frame_power(const FrameGeom& g, double u) {
  double acc = 0.0;
  for (int m = 1; m <= g.k; ++m) {
    const WindowEdges w = window_edges(g, u, m);
    if (std::isfinite(w.lc))
      acc += g.g_sat *
             (special::exp_int1_log(w.la1) - special::exp_int1_log(w.la2));
    const double lc_pow = w.t * (std::log(g.bk) - u) + g.s[m] / (m + g.bk);
    acc += special::scaled_upper_gamma_diff(w.t, lc_pow, w.le1, w.le2);
    acc += special::exp_int1_log(w.le2) - special::exp_int1_log(w.le1);
  }
  return acc;
}

// E[sum_j var_j 2^(-R_j) | frame] in closed form (not yet divided by K).
double frame_distortion(const FrameGeom& g, double u) {
  const double ld11 = u + g.lkd1[0];
  // Mass below the first window: no transmission, full variance.
  double zero_mass;
  if (ld11 > 700.0)
    zero_mass = 1.0;
  else
    zero_mass = -std::expm1(-std::exp(ld11));
  double acc = g.tail[0] * zero_mass;
  for (int m = 1; m <= g.k; ++m) {
    const WindowEdges w = window_edges(g, u, m);
    if (std::isfinite(w.lc))
      acc += g.sat_distortion * special::exp_diff_log(w.la1, w.la2);
    const double lc_dist =
        std::log(static_cast<double>(m)) + g.s[m] / (m + g.bk) +
        (1.0 - w.t) * (u - std::log(g.bk));
    acc += special::scaled_upper_gamma_diff(w.t, lc_dist, w.le1, w.le2);
    acc += g.tail[m] * special::exp_diff_log(w.le1, w.le2);
  }
  return acc;
}

struct Precomputed {
  std::vector<FrameGeom> geoms;
  std::vector<double> probs;
};

Precomputed precompute(const SourceModel& source, const SystemConfig& cfg) {
  source.validate();
  cfg.validate();
  Precomputed pre;
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  pre.geoms.reserve(frames.size());
  pre.probs.reserve(frames.size());
  for (const auto& f : frames) {
    pre.geoms.push_back(make_geom(f, cfg));
    pre.probs.push_back(f.probability);
  }
  return pre;
}

double mean_power_u(const Precomputed& pre, double u) {
  double acc = 0.0;
  for (size_t i = 0; i < pre.geoms.size(); ++i)
    acc += pre.probs[i] * frame_power(pre.geoms[i], u);
  return acc;
}

}  // namespace

ScorpaRegions regions(const FrameState& frame, double lambda,
                      const SystemConfig& cfg) {
  if (!(lambda > 0.0)) throw DomainError("scorpa::regions: lambda must be > 0");
  cfg.validate();
  const FrameGeom g = make_geom(frame, cfg);
  const double u = std::log(lambda);
  ScorpaRegions r;
  const int k = g.k;
  r.c.resize(k);
  r.d1.resize(k);
  r.d2.resize(k);
  r.a1.resize(k);
  r.a2.resize(k);
  r.e1.resize(k);
  r.e2.resize(k);
  for (int m = 1; m <= k; ++m) {
    const WindowEdges w = window_edges(g, u, m);
    r.c[m - 1] = std::isinf(w.lc) ? kInf : std::exp(w.lc);
    r.d1[m - 1] = std::exp(w.ld1);
    r.a1[m - 1] = std::exp(w.la1);
    r.e1[m - 1] = std::exp(w.le1);
    r.e2[m - 1] = std::exp(w.le2);
    r.a2[m - 1] = std::isinf(w.la2) ? kInf : std::exp(w.la2);
    r.d2[m - 1] = (m < k) ? std::exp(u + g.lkd1[m]) : kInf;
  }
  return r;
}

double expected_power(const SourceModel& source, const SystemConfig& cfg,
                      double log_lambda) {
  return mean_power_u(precompute(source, cfg), log_lambda);
}

ScorpaSolution solve_lambda(const SourceModel& source, const SystemConfig& cfg) {
  const Precomputed pre = precompute(source, cfg);
  const double target = cfg.avg_power;

  // E[gamma] is decreasing in u = ln(lambda). Upper bracket: power below
  // target. Lower bracket: start from a theory-driven floor (the multiplier
  // scales like exp(-P/g_sat) with a finite buffer, P^-(b+1) without) and
  // extend geometrically until power exceeds target.
  double u_hi = 30.0;
  int guard = 0;
  while (mean_power_u(pre, u_hi) > target) {
    u_hi += 60.0;
    if (++guard > 50)
      throw BracketingFailure("scorpa::solve_lambda: no upper bracket");
  }
  double u_lo = -30.0 - (cfg.bandwidth_ratio + 1.0) * std::log1p(target);
  if (cfg.buffer_finite()) {
    const double g_sat = std::exp2(cfg.buffer_cap / cfg.bandwidth_ratio) - 1.0;
    u_lo = std::min(u_lo, -target / g_sat - 50.0 * (1.0 + std::log1p(target)));
  }
  guard = 0;
  while (mean_power_u(pre, u_lo) < target) {
    u_lo = 2.0 * u_lo - 60.0;
    if (++guard > 50)
      throw BracketingFailure("scorpa::solve_lambda: no lower bracket");
  }

  double achieved = 0.0;
  double u_mid = 0.5 * (u_lo + u_hi);
  for (int it = 0; it < 400; ++it) {
    u_mid = 0.5 * (u_lo + u_hi);
    achieved = mean_power_u(pre, u_mid);
    if (std::abs(achieved - target) <= 1e-10 * target) break;
    if (achieved > target)
      u_lo = u_mid;
    else
      u_hi = u_mid;
    if (u_hi - u_lo <= 1e-14 * std::max(1.0, std::abs(u_mid))) break;
  }
  ScorpaSolution sol;
  sol.log_lambda = u_mid;
  sol.lambda = std::exp(u_mid);  // may underflow; log_lambda is authoritative
  sol.achieved_power = achieved;
  sol.solved = true;
  return sol;
}

PolicyDecision policy(const FrameState& frame, double alpha,
                      const ScorpaSolution& sol, const SystemConfig& cfg) {
  if (!sol.solved) throw UnsolvedLambda("scorpa::policy: multiplier not solved");
  if (!(alpha >= 0.0)) throw DomainError("scorpa::policy: alpha must be >= 0");
  const FrameGeom g = make_geom(frame, cfg);
  const double u = sol.log_lambda;
  const double la = (alpha == 0.0) ? -kInf : std::log(alpha);

  PolicyDecision out;
  out.source_rates.assign(g.k, 0.0);
  // Window index: number of edges at or below alpha. Zero means no
  // transmission (the gain cannot pay for any rate).
  int m = 0;
  while (m < g.k && la >= u + g.lkd1[m]) ++m;
  if (m == 0) return out;

  if (std::isfinite(g.lkc[m - 1]) && la >= u + g.lkc[m - 1]) {
    // Buffer-saturated: fixed total rate K*B, inversion power for it.
    const auto alloc = waterfill::allocate(frame.sorted_variances,
                                           cfg.frame_blocks * cfg.buffer_cap);
    out.source_rates = alloc.rates;
    out.channel_rate = cfg.buffer_cap / cfg.bandwidth_ratio;
    out.power = g.g_sat / alpha;
    return out;
  }
  // Interior window: reverse water-fill at level lambda2 with m active
  // blocks; capacity is met with equality.
  const double lbk = std::log(g.bk);
  const double ln_lambda2 = (g.s[m] + g.bk * (u - la - lbk)) / (m + g.bk);
  for (int j = 0; j < m; ++j)
    out.source_rates[j] = std::max((g.lnv[j] - ln_lambda2) / kLn2, 0.0);
  const double log_ratio = la + lbk + ln_lambda2 - u;  // ln(1 + alpha*gamma)
  out.channel_rate = log_ratio / kLn2;
  out.power = std::expm1(log_ratio) / alpha;
  return out;
}

double mean_distortion(const SourceModel& source, const SystemConfig& cfg,
                       const ScorpaSolution& sol) {
  if (!sol.solved)
    throw UnsolvedLambda("scorpa::mean_distortion: multiplier not solved");
  const Precomputed pre = precompute(source, cfg);
  double acc = 0.0;
  for (size_t i = 0; i < pre.geoms.size(); ++i)
    acc += pre.probs[i] * frame_distortion(pre.geoms[i], sol.log_lambda);
  return acc / cfg.frame_blocks;
}

std::vector<double> quadrature_breakpoints(const FrameState& frame,
                                           const ScorpaSolution& sol,
                                           const SystemConfig& cfg) {
  if (!sol.solved)
    throw UnsolvedLambda("scorpa::quadrature_breakpoints: multiplier not solved");
  const FrameGeom g = make_geom(frame, cfg);
  std::vector<double> pts;
  for (int m = 1; m <= g.k; ++m) {
    const double ld1 = sol.log_lambda + g.lkd1[m - 1];
    if (ld1 > -700.0 && ld1 < 600.0) pts.push_back(std::exp(ld1));
    if (std::isfinite(g.lkc[m - 1])) {
      const double lc = sol.log_lambda + g.lkc[m - 1];
      if (lc > -700.0 && lc < 600.0) pts.push_back(std::exp(lc));
    }
  }
  // Log-spaced ladder beyond the last finite edge; integrable power-law
  // kinks need the decades resolved before the tail map takes over.
  double base = 1e-3;
  for (const double p : pts) base = std::max(base, p);
  for (double x = base; x < 40.0; x *= 10.0) pts.push_back(x);
  pts.push_back(40.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace qsfl::scorpa
