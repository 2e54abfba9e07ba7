#include "qsfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>

#include <json.hpp>

namespace qsfl {

double SourceModel::mean_variance() const {
  double m = 0.0;
  for (int i = 0; i < num_states; ++i) m += pmf[i] * variances[i];
  return m;
}

void SourceModel::validate() const {
  if (num_states <= 0 || variances.size() != static_cast<size_t>(num_states) ||
      pmf.size() != static_cast<size_t>(num_states))
    throw ConfigError("source: state count and array lengths disagree");
  double sum = 0.0;
  for (int i = 0; i < num_states; ++i) {
    if (!(variances[i] > 0.0) || !std::isfinite(variances[i]))
      throw ConfigError("source: variances must be positive and finite");
    if (!(pmf[i] >= 0.0) || !std::isfinite(pmf[i]))
      throw ConfigError("source: pmf entries must be nonnegative");
    sum += pmf[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("source: pmf must sum to 1");
}

namespace {
const std::vector<double> kStateVariances = {1, 2, 5, 10, 17, 26, 37, 50, 65};
}

SourceModel make_source_u() {
  SourceModel s;
  s.num_states = 9;
  s.variances = kStateVariances;
  s.pmf.assign(9, 1.0 / 9.0);
  return s;
}

SourceModel make_source_g() {
  SourceModel s;
  s.num_states = 9;
  s.variances = kStateVariances;
  s.pmf.resize(9);
  double total = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double d = (i + 1) - 5.49;
    s.pmf[i] = std::exp(-d * d / 5.04);
    total += s.pmf[i];
  }
  for (double& p : s.pmf) p /= total;
  return s;
}

SourceModel make_source_d() {
  SourceModel s;
  s.num_states = 1;
  s.variances = {23.66};
  s.pmf = {1.0};
  return s;
}

void SystemConfig::validate() const {
  if (frame_blocks < 1) throw ConfigError("config: K must be a positive integer");
  if (!(bandwidth_ratio >= 1.0) || !std::isfinite(bandwidth_ratio))
    throw ConfigError("config: b must be a finite number >= 1");
  if (!(buffer_cap > 0.0)) throw ConfigError("config: B_max must be positive");
  if (!(avg_power > 0.0) || !std::isfinite(avg_power))
    throw ConfigError("config: power must be positive and finite");
}

std::vector<FrameState> enumerate_frames(const SourceModel& source, int frame_blocks,
                                         const FrameEnumOptions& opts) {
  source.validate();
  if (frame_blocks < 1) throw ConfigError("enumerate_frames: K must be >= 1");
  double count = 1.0;
  for (int k = 0; k < frame_blocks; ++k) count *= source.num_states;
  if (count > static_cast<double>(opts.cap))
    throw CapExceeded("enumerate_frames: state space exceeds cap");

  std::vector<FrameState> frames;
  frames.reserve(static_cast<size_t>(count));
  std::vector<int> states(frame_blocks, 0);
  std::map<std::vector<int>, size_t> merged_index;
  while (true) {
    FrameState f;
    f.states = states;
    f.probability = 1.0;
    f.sorted_variances.resize(frame_blocks);
    for (int k = 0; k < frame_blocks; ++k) {
      f.probability *= source.pmf[states[k]];
      f.sorted_variances[k] = source.variances[states[k]];
    }
    std::sort(f.sorted_variances.begin(), f.sorted_variances.end(),
              std::greater<double>());
    if (opts.merge) {
      std::vector<int> key = states;
      std::sort(key.begin(), key.end());
      auto [it, inserted] = merged_index.try_emplace(std::move(key), frames.size());
      if (inserted)
        frames.push_back(std::move(f));
      else
        frames[it->second].probability += f.probability;
    } else {
      frames.push_back(std::move(f));
    }
    int k = frame_blocks - 1;
    while (k >= 0 && ++states[k] == source.num_states) states[k--] = 0;
    if (k < 0) break;
  }
  return frames;
}

double channel_gain_density(double alpha) {
  return alpha < 0.0 ? 0.0 : std::exp(-alpha);
}

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError(std::string("config: missing or non-numeric key '") + key + "'");
  return j[key].get<double>();
}

}  // namespace

ParsedConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");

  ParsedConfig out;
  if (!j.contains("source")) throw ConfigError("config: missing key 'source'");
  const json& src = j["source"];
  if (src.is_string()) {
    const std::string name = src.get<std::string>();
    if (name == "U")
      out.source = make_source_u();
    else if (name == "G")
      out.source = make_source_g();
    else if (name == "D")
      out.source = make_source_d();
    else
      throw ConfigError("config: source must be one of U, G, D or an object");
  } else if (src.is_object()) {
    if (!src.contains("variances") || !src.contains("pmf"))
      throw ConfigError("config: custom source needs 'variances' and 'pmf'");
    try {
      out.source.variances = src["variances"].get<std::vector<double>>();
      out.source.pmf = src["pmf"].get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: bad source arrays: ") + e.what());
    }
    out.source.num_states = static_cast<int>(out.source.variances.size());
  } else {
    throw ConfigError("config: source must be a string or an object");
  }
  out.source.validate();

  const double k = require_number(j, "K");
  if (k != std::floor(k) || k < 1 || k > 64)
    throw ConfigError("config: K must be an integer in [1, 64]");
  out.cfg.frame_blocks = static_cast<int>(k);
  out.cfg.bandwidth_ratio = require_number(j, "b");
  if (!j.contains("B_max"))
    throw ConfigError("config: missing key 'B_max'");
  else if (j["B_max"].is_string() && j["B_max"].get<std::string>() == "inf")
    out.cfg.buffer_cap = std::numeric_limits<double>::infinity();
  else if (j["B_max"].is_number())
    out.cfg.buffer_cap = j["B_max"].get<double>();
  else
    throw ConfigError("config: B_max must be a number or \"inf\"");
  out.p_bar_dB = require_number(j, "P_bar_dB");
  out.cfg.avg_power = std::pow(10.0, out.p_bar_dB / 10.0);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned())
      throw ConfigError("config: seed must be an unsigned integer");
    out.seed = j["seed"].get<unsigned long long>();
  }
  out.cfg.validate();
  return out;
}

std::string config_digest(const ParsedConfig& parsed) {
  json canon;
  canon["K"] = parsed.cfg.frame_blocks;
  canon["b"] = parsed.cfg.bandwidth_ratio;
  if (parsed.cfg.buffer_finite())
    canon["B_max"] = parsed.cfg.buffer_cap;
  else
    canon["B_max"] = "inf";
  canon["P_bar_dB"] = parsed.p_bar_dB;
  canon["seed"] = parsed.seed;
  canon["source"] = {{"variances", parsed.source.variances},
                     {"pmf", parsed.source.pmf}};
  const std::string text = canon.dump();
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace qsfl
