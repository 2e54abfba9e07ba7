#include "qsfl/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "qsfl/rng.hpp"

namespace qsfl::oracle {
namespace {

constexpr double kLn2 = 0.6931471805599453;

struct Realized {
  double distortion;  // per sample
  bool outage;
};

Realized realize(const FrameState& frame, const PolicyDecision& d, double alpha,
                 const SystemConfig& cfg) {
  const size_t k = frame.sorted_variances.size();
  double sum_rate = 0.0;
  for (double r : d.source_rates) sum_rate += r;
  const double capacity_bits = cfg.bk() * (std::log1p(alpha * d.power) / kLn2);
  if (sum_rate > capacity_bits + 1e-9) {
    double full = 0.0;
    for (double v : frame.sorted_variances) full += v;
    return {full / k, true};
  }
  double dist = 0.0;
  for (size_t j = 0; j < k; ++j)
    dist += frame.sorted_variances[j] * std::exp2(-d.source_rates[j]);
  return {dist / k, false};
}

int thread_count() {
  const char* env = std::getenv("QSFL_THREADS");
  if (!env) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return static_cast<int>(std::clamp(n, 1L, 64L));
}

using Partial = std::array<double, 5>;  // dist, dist^2, power, power^2, outages

// Order-independent pairwise reduction over the per-batch partials.
Partial tree_reduce(std::vector<Partial> parts) {
  if (parts.empty()) return {0, 0, 0, 0, 0};
  while (parts.size() > 1) {
    std::vector<Partial> next;
    next.reserve((parts.size() + 1) / 2);
    for (size_t i = 0; i + 1 < parts.size(); i += 2) {
      Partial p;
      for (int j = 0; j < 5; ++j) p[j] = parts[i][j] + parts[i + 1][j];
      next.push_back(p);
    }
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts[0];
}

}  // namespace

double realized_distortion(const FrameState& frame, const PolicyDecision& d,
                           double alpha, const SystemConfig& cfg) {
  return realize(frame, d, alpha, cfg).distortion;
}

double quadrature_distortion(const SchemePolicy& policy, const SourceModel& source,
                             const SystemConfig& cfg,
                             const quadrature::QuadratureOptions& opts) {
  source.validate();
  cfg.validate();
  const auto frames = enumerate_frames(source, cfg.frame_blocks);
  const double frame_tol =
      std::max(opts.abs_tol / static_cast<double>(frames.size()), 1e-13);
  double acc = 0.0;
  for (const auto& frame : frames) {
    std::vector<double> pts =
        policy.breakpoints ? policy.breakpoints(frame)
                           : std::vector<double>{1e-3, 1.0, 10.0, 40.0};
    pts.erase(std::remove_if(pts.begin(), pts.end(),
                             [](double p) { return !(p > 0.0) || !std::isfinite(p); }),
              pts.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.empty()) pts.push_back(40.0);

    auto integrand = [&](double a) -> double {
      return realize(frame, policy.decide(frame, a), a, cfg).distortion *
             channel_gain_density(a);
    };
    quadrature::QuadratureOptions seg_opts = opts;
    seg_opts.abs_tol = std::max(frame_tol / (pts.size() + 1.0), 5e-14);
    double val = 0.0;
    double lo = 0.0;
    for (const double p : pts) {
      val += quadrature::integrate(integrand, lo, p, seg_opts);
      lo = p;
    }
    val += quadrature::integrate_semi_infinite(integrand, lo, seg_opts);
    acc += frame.probability * val;
  }
  return acc;
}

McReport simulate(const SchemePolicy& policy, const SourceModel& source,
                  const SystemConfig& cfg, const McConfig& mc) {
  source.validate();
  cfg.validate();
  if (mc.trials < 2) throw DomainError("simulate: needs at least 2 trials");
  if (mc.batch < 1) throw DomainError("simulate: batch must be positive");

  const int k = cfg.frame_blocks;
  std::vector<double> cum(source.num_states);
  std::partial_sum(source.pmf.begin(), source.pmf.end(), cum.begin());
  cum.back() = 1.0;

  const long long nbatches = (mc.trials + mc.batch - 1) / mc.batch;
  std::vector<Partial> partials(static_cast<size_t>(nbatches));

  auto run_batch = [&](long long bi) {
    Partial p{0, 0, 0, 0, 0};
    FrameState frame;
    frame.states.resize(k);
    frame.sorted_variances.resize(k);
    frame.probability = 1.0;
    const long long lo = bi * mc.batch;
    const long long hi = std::min<long long>(lo + mc.batch, mc.trials);
    for (long long t = lo; t < hi; ++t) {
      rng::TrialStream ts(mc.seed, static_cast<std::uint64_t>(t));
      for (int j = 0; j < k; ++j) {
        const double u = ts.next_unit();
        const int idx = static_cast<int>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        frame.states[j] = std::min(idx, source.num_states - 1);
        frame.sorted_variances[j] = source.variances[frame.states[j]];
      }
      std::sort(frame.sorted_variances.begin(), frame.sorted_variances.end(),
                std::greater<double>());
      const double alpha = ts.next_exp();
      const PolicyDecision d = policy.decide(frame, alpha);
      const Realized r = realize(frame, d, alpha, cfg);
      p[0] += r.distortion;
      p[1] += r.distortion * r.distortion;
      p[2] += d.power;
      p[3] += d.power * d.power;
      p[4] += r.outage ? 1.0 : 0.0;
    }
    partials[static_cast<size_t>(bi)] = p;
  };

  const int workers = std::min<long long>(thread_count(), nbatches);
  if (workers <= 1) {
    for (long long bi = 0; bi < nbatches; ++bi) run_batch(bi);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (long long bi = w; bi < nbatches; bi += workers) run_batch(bi);
      });
    for (auto& th : pool) th.join();
  }

  const Partial total = tree_reduce(std::move(partials));
  const double n = static_cast<double>(mc.trials);
  McReport rep;
  rep.mean_distortion = total[0] / n;
  rep.mean_power = total[2] / n;
  const double var_d =
      std::max(0.0, (total[1] - n * rep.mean_distortion * rep.mean_distortion) /
                        (n - 1.0));
  const double var_p =
      std::max(0.0, (total[3] - n * rep.mean_power * rep.mean_power) / (n - 1.0));
  rep.std_error = std::sqrt(var_d / n);
  rep.std_error_power = std::sqrt(var_p / n);
  rep.outage_rate = total[4] / n;
  return rep;
}

}  // namespace qsfl::oracle
