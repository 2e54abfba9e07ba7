#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsfl/errors.hpp"
#include "qsfl/model.hpp"
#include "qsfl/oracle.hpp"
#include "qsfl/rng.hpp"
#include "qsfl/schemes.hpp"
#include "qsfl/scoracp.hpp"
#include "qsfl/special.hpp"
#include "qsfl/waterfill.hpp"
#include "test_util.hpp"

using namespace qsfl;

namespace {

SystemConfig make_cfg(int k, double b, double buffer, double p_dB) {
  SystemConfig cfg;
  cfg.frame_blocks = k;
  cfg.bandwidth_ratio = b;
  cfg.buffer_cap = buffer;
  cfg.avg_power = std::pow(10.0, p_dB / 10.0);
  return cfg;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

FrameState make_frame(std::vector<double> vars_desc) {
  FrameState f;
  f.sorted_variances = std::move(vars_desc);
  f.states.assign(f.sorted_variances.size(), 0);
  f.probability = 1.0;
  return f;
}

}  // namespace

TEST_CASE("region thresholds have their analytic values") {
  // Second block activates when (1+alpha P)^2 reaches v1/v2 * (1+alpha P)^0,
  // i.e. 1 + alpha P = sqrt(v1/v2) for two blocks at bandwidth ratio 1.
  auto cfg = make_cfg(2, 1.0, 4.0, 10.0);
  auto frame = make_frame({65.0, 1.0});
  auto r = scoracp::regions(frame, cfg);
  REQUIRE(r.d1.size() == 2);
  CHECK(r.d1[0] == 0.0);
  CHECK(rel_err(r.d1[1], (std::sqrt(65.0) - 1.0) / 10.0) < 1e-12);
  CHECK(r.d2[0] == r.d1[1]);
  CHECK(r.d2[1] == kInf);
  // Buffer saturates when log2(1+alpha P) = B_max (bandwidth ratio 1).
  CHECK(rel_err(r.c, 15.0 / 10.0) < 1e-12);

  auto r_inf = scoracp::regions(frame, make_cfg(2, 1.0, kInf, 10.0));
  CHECK(r_inf.c == kInf);

  // Single block: active from alpha = 0.
  auto r1 = scoracp::regions(make_frame({23.66}), make_cfg(1, 2.0, 4.0, 10.0));
  CHECK(r1.d1[0] == 0.0);
  CHECK(rel_err(r1.c, (std::exp2(2.0) - 1.0) / 10.0) < 1e-12);
}

TEST_CASE("policy is capacity-filling water-filling at constant power") {
  auto cfg = make_cfg(2, 1.0, 4.0, 10.0);
  auto frames = enumerate_frames(make_source_u(), 2);
  rng::TrialStream stream(1717, 0);
  for (int draw = 0; draw < 1000; ++draw) {
    const auto& frame = frames[static_cast<size_t>(stream.next_unit() * frames.size())];
    double alpha = stream.next_exp();
    auto dec = scoracp::policy(frame, alpha, cfg);
    CHECK(dec.power == cfg.avg_power);
    double rate = std::min(std::log2(1.0 + alpha * cfg.avg_power),
                           cfg.buffer_cap / cfg.bandwidth_ratio);
    CHECK(rel_err(dec.channel_rate, rate) < 1e-12);
    auto alloc = waterfill::allocate(frame.sorted_variances, cfg.bk() * rate);
    REQUIRE(dec.source_rates.size() == alloc.rates.size());
    for (size_t j = 0; j < alloc.rates.size(); ++j)
      CHECK(std::fabs(dec.source_rates[j] - alloc.rates[j]) < 1e-12);
  }
}

TEST_CASE("mean distortion reproduces independently computed references") {
  struct Case {
    SourceModel src;
    SystemConfig cfg;
    double distortion;
  };
  const Case cases[] = {
      {make_source_u(), make_cfg(2, 1.0, 4.0, 10.0), 3.9418190247058176},
      {make_source_u(), make_cfg(2, 2.0, kInf, 30.0), 0.018937373324640978},
      {make_source_u(), make_cfg(3, 1.0, 2.0, 20.0), 4.2519754486616135},
      {make_source_g(), make_cfg(2, 1.0, kInf, 10.0), 4.3201501868155292},
      {make_source_d(), make_cfg(1, 2.0, kInf, 10.0), 1.8893355739219804},
  };
  for (const auto& c : cases)
    CHECK(rel_err(scoracp::mean_distortion(c.src, c.cfg), c.distortion) < 1e-10);
}

TEST_CASE("single-block unbounded buffer reduces to a known special-function form") {
  // One block at bandwidth ratio b: E[D] = var e^{1/P} E_b(1/P) / P.
  auto d = make_source_d();
  for (double b : {1.0, 2.0, 4.0}) {
    auto cfg = make_cfg(1, b, kInf, 10.0);
    double expected = 23.66 * std::exp(0.1) * special::exp_int(b, 0.1) / 10.0;
    CHECK(rel_err(scoracp::mean_distortion(d, cfg), expected) < 1e-12);
  }
}

TEST_CASE("mean distortion agrees with direct quadrature over the policy") {
  auto src = make_source_u();
  auto cfg = make_cfg(2, 1.0, 4.0, 10.0);
  auto policy = make_scheme_policy(SchemeKind::scoracp, src, cfg);
  double q = oracle::quadrature_distortion(policy, src, cfg);
  CHECK(rel_err(q, scoracp::mean_distortion(src, cfg)) < 1e-9);
}

TEST_CASE("high-power expansion constants") {
  // One block, bandwidth ratio 2: P E[D] -> var/(b-1) exactly.
  auto d = make_source_d();
  auto consts = scoracp::asymptotic_constants(d, make_cfg(1, 2.0, kInf, 60.0));
  CHECK(rel_err(consts.v_m, 23.66) < 1e-12);
  CHECK(std::isnan(consts.w_m));

  // Bandwidth ratio 1 carries a slow logarithmic factor through E_1.
  auto consts1 = scoracp::asymptotic_constants(d, make_cfg(1, 1.0, kInf, 60.0));
  CHECK(std::isnan(consts1.v_m));
  CHECK(rel_err(consts1.w_m, 23.66 * special::exp_int(1.0, 1e-6)) < 1e-10);

  // The constants reproduce P * E[D] at large P for a multi-state source.
  auto u = make_source_u();
  auto cfg_b2 = make_cfg(2, 2.0, kInf, 80.0);
  double scaled_b2 = cfg_b2.avg_power * scoracp::mean_distortion(u, cfg_b2);
  CHECK(rel_err(scaled_b2, scoracp::asymptotic_constants(u, cfg_b2).v_m) < 1e-3);

  auto cfg_b1 = make_cfg(2, 1.0, kInf, 60.0);
  double scaled_b1 = cfg_b1.avg_power * scoracp::mean_distortion(u, cfg_b1);
  CHECK(rel_err(scaled_b1, scoracp::asymptotic_constants(u, cfg_b1).w_m) < 1e-3);
}

TEST_CASE("quadrature breakpoints are finite and sorted") {
  auto cfg = make_cfg(2, 1.0, 4.0, 10.0);
  auto bp = scoracp::quadrature_breakpoints(make_frame({65.0, 1.0}), cfg);
  REQUIRE(!bp.empty());
  CHECK(std::is_sorted(bp.begin(), bp.end()));
  for (double x : bp) CHECK(std::isfinite(x));
}
