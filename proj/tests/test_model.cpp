#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qsfl/errors.hpp"
#include "qsfl/model.hpp"
#include "qsfl/quadrature.hpp"
#include "test_util.hpp"

using namespace qsfl;

TEST_CASE("built-in sources have the documented statistics") {
  SourceModel u = make_source_u();
  CHECK(u.num_states == 9);
  CHECK(u.variances.front() == 1.0);
  CHECK(u.variances.back() == 65.0);
  CHECK(rel_err(u.mean_variance(), 213.0 / 9.0) < 1e-14);
  for (double p : u.pmf) CHECK(rel_err(p, 1.0 / 9.0) < 1e-14);
  u.validate();

  SourceModel g = make_source_g();
  CHECK(g.num_states == 9);
  CHECK(g.variances == u.variances);
  // Mean under the discretized bell-shaped state weighting (50-digit reference).
  CHECK(rel_err(g.mean_variance(), 23.38129420671475539) < 1e-12);
  CHECK(rel_err(std::accumulate(g.pmf.begin(), g.pmf.end(), 0.0), 1.0) < 1e-12);
  g.validate();

  SourceModel d = make_source_d();
  CHECK(d.num_states == 1);
  CHECK(d.variances == std::vector<double>{23.66});
  CHECK(d.pmf == std::vector<double>{1.0});
  d.validate();
}

TEST_CASE("source validation rejects malformed models") {
  SourceModel bad = make_source_u();
  bad.pmf[0] = 0.0;  // pmf no longer sums to one
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = make_source_u();
  bad.variances[3] = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  bad = make_source_u();
  bad.pmf.pop_back();
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("system config validation") {
  SystemConfig cfg;
  cfg.frame_blocks = 2;
  cfg.bandwidth_ratio = 1.0;
  cfg.buffer_cap = 4.0;
  cfg.avg_power = 10.0;
  cfg.validate();
  CHECK(cfg.buffer_finite());
  CHECK(cfg.bk() == 2.0);

  SystemConfig bad = cfg;
  bad.frame_blocks = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.bandwidth_ratio = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.buffer_cap = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.avg_power = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  cfg.buffer_cap = std::numeric_limits<double>::infinity();
  cfg.validate();
  CHECK(!cfg.buffer_finite());
}

TEST_CASE("frame enumeration covers the full product space") {
  SourceModel u = make_source_u();
  auto frames = enumerate_frames(u, 2);
  CHECK(frames.size() == 81);
  double total = 0.0;
  for (const auto& f : frames) {
    CHECK(f.states.size() == 2);
    CHECK(f.sorted_variances.size() == 2);
    CHECK(std::is_sorted(f.sorted_variances.rbegin(), f.sorted_variances.rend()));
    CHECK(rel_err(f.probability, 1.0 / 81.0) < 1e-14);
    total += f.probability;
  }
  CHECK(rel_err(total, 1.0) < 1e-12);

  auto single = enumerate_frames(make_source_d(), 3);
  CHECK(single.size() == 1);
  CHECK(single[0].probability == 1.0);
  CHECK(single[0].sorted_variances == std::vector<double>{23.66, 23.66, 23.66});
}

TEST_CASE("frame merging collapses permutations without losing mass") {
  SourceModel u = make_source_u();
  FrameEnumOptions opts;
  opts.merge = true;
  auto merged = enumerate_frames(u, 2, opts);
  CHECK(merged.size() == 45);  // 9 doubles + C(9,2) unordered pairs
  double total = 0.0;
  for (const auto& f : merged) total += f.probability;
  CHECK(rel_err(total, 1.0) < 1e-12);
  // Mixed pairs carry twice the product probability.
  int doubles = 0, pairs = 0;
  for (const auto& f : merged) {
    if (f.sorted_variances[0] == f.sorted_variances[1]) {
      CHECK(rel_err(f.probability, 1.0 / 81.0) < 1e-14);
      ++doubles;
    } else {
      CHECK(rel_err(f.probability, 2.0 / 81.0) < 1e-14);
      ++pairs;
    }
  }
  CHECK(doubles == 9);
  CHECK(pairs == 36);
}

TEST_CASE("frame enumeration enforces its combinatorial cap") {
  SourceModel u = make_source_u();
  CHECK_THROWS_AS(enumerate_frames(u, 7), CapExceeded);  // 9^7 > 1e6
  FrameEnumOptions opts;
  opts.cap = 50;
  CHECK_THROWS_AS(enumerate_frames(u, 2, opts), CapExceeded);
}

TEST_CASE("channel gain density is a unit-mass exponential") {
  CHECK(channel_gain_density(0.0) == 1.0);
  CHECK(rel_err(channel_gain_density(2.0), std::exp(-2.0)) < 1e-15);
  quadrature::QuadratureOptions opts;
  opts.abs_tol = 1e-12;
  double mass = quadrature::integrate_semi_infinite(channel_gain_density, 0.0, opts);
  CHECK(rel_err(mass, 1.0) < 1e-10);
}

TEST_CASE("config parsing accepts the documented schema") {
  auto parsed = parse_config(R"({"source":"U","K":2,"b":1,"B_max":4,"P_bar_dB":10,"seed":42})");
  CHECK(parsed.source.num_states == 9);
  CHECK(parsed.cfg.frame_blocks == 2);
  CHECK(parsed.cfg.bandwidth_ratio == 1.0);
  CHECK(parsed.cfg.buffer_cap == 4.0);
  CHECK(rel_err(parsed.cfg.avg_power, 10.0) < 1e-14);
  CHECK(parsed.p_bar_dB == 10.0);
  CHECK(parsed.seed == 42);

  auto inf = parse_config(R"({"source":"D","K":1,"b":2,"B_max":"inf","P_bar_dB":0})");
  CHECK(!inf.cfg.buffer_finite());
  CHECK(inf.seed == 0);  // default

  auto custom = parse_config(
      R"({"source":{"variances":[1,4],"pmf":[0.25,0.75]},"K":2,"b":1.5,"B_max":6,"P_bar_dB":20})");
  CHECK(custom.source.num_states == 2);
  CHECK(rel_err(custom.source.mean_variance(), 0.25 + 3.0) < 1e-14);
}

TEST_CASE("config parsing rejects malformed documents") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"K":2,"b":1,"B_max":4,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"X","K":2,"b":1,"B_max":4,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"U","K":0,"b":1,"B_max":4,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"U","K":1.5,"b":1,"B_max":4,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"U","K":2,"b":0.25,"B_max":4,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"U","K":2,"b":1,"B_max":0,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"U","K":2,"b":1,"B_max":-3,"P_bar_dB":10})"), ConfigError);
  CHECK_THROWS_AS(
      parse_config(R"({"source":"U","K":80,"b":1,"B_max":4,"P_bar_dB":10})"), ConfigError);
}

TEST_CASE("config digest is canonical and sensitive to content") {
  auto a = parse_config(R"({"source":"U","K":2,"b":1,"B_max":4,"P_bar_dB":10,"seed":7})");
  auto b = parse_config(
      R"({ "seed": 7, "P_bar_dB": 10, "B_max": 4, "b": 1, "K": 2, "source": "U" })");
  CHECK(config_digest(a) == config_digest(b));
  CHECK(config_digest(a).size() == 16);
  CHECK(config_digest(a).find_first_not_of("0123456789abcdef") == std::string::npos);

  auto c = parse_config(R"({"source":"U","K":2,"b":1,"B_max":4,"P_bar_dB":10,"seed":8})");
  CHECK(config_digest(a) != config_digest(c));
  auto d = parse_config(R"({"source":"U","K":2,"b":1,"B_max":"inf","P_bar_dB":10,"seed":7})");
  CHECK(config_digest(a) != config_digest(d));
}
