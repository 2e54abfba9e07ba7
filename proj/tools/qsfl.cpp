// Command-line front end: config ingestion, closed-form scheme evaluation,
// power sweeps, Monte Carlo verification, and reference-table reproduction.
// Emits CSV/JSON only; every file embeds a run manifest.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qsfl/asymptotics.hpp"
#include "qsfl/errors.hpp"
#include "qsfl/model.hpp"
#include "qsfl/oracle.hpp"
#include "qsfl/schemes.hpp"

using nlohmann::ordered_json;
using namespace qsfl;

namespace {

constexpr const char* kToolVersion = "0.1.0";
constexpr double kInf = std::numeric_limits<double>::infinity();

// All interface floats carry 9 significant digits.
std::string fmt9(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

// JSON numbers must carry the same 9 significant digits as the CSV output,
// but the library renders doubles with shortest-round-trip digits. Tag the
// formatted text and unquote it after dumping; non-finite values stay as
// plain strings ("inf" is not a JSON number).
constexpr char kNumTag = '\x01';

ordered_json num9(double v) {
  if (!std::isfinite(v)) return fmt9(v);
  return kNumTag + fmt9(v) + kNumTag;
}

std::string dump_doc(const ordered_json& doc) {
  std::string s = doc.dump(2);
  // The tag appears in the dump as the escape \u0001 just inside the quotes.
  for (const char* pat : {"\"\\u0001", "\\u0001\""}) {
    const size_t n = std::string(pat).size();
    size_t pos = 0;
    while ((pos = s.find(pat, pos)) != std::string::npos) s.erase(pos, n);
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("output: cannot open file '" + out_path + "'");
  out << content;
}

// Deterministic timestamp: honours SOURCE_DATE_EPOCH so identical inputs
// reproduce identical bytes; defaults to the epoch origin.
std::string iso_timestamp() {
  long long epoch = 0;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH")) epoch = std::atoll(e);
  std::time_t t = static_cast<std::time_t>(epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string join_args(int argc, char** argv) {
  std::string cmd = "qsfl";
  for (int i = 1; i < argc; ++i) {
    cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

ordered_json make_manifest(const std::string& command, const std::string& digest,
                           unsigned long long seed) {
  ordered_json m;
  m["command"] = command;
  m["config_digest"] = digest;
  m["tool_version"] = kToolVersion;
  m["seed"] = seed;
  m["timestamp"] = iso_timestamp();
  return m;
}

std::string manifest_comments(const ordered_json& manifest) {
  std::string s;
  for (const auto& [key, value] : manifest.items()) {
    s += "# " + key + ": ";
    s += value.is_string() ? value.get<std::string>() : value.dump();
    s += '\n';
  }
  return s;
}

std::vector<SchemeKind> schemes_from_arg(const std::string& arg) {
  if (arg == "all")
    return {SchemeKind::scorpa, SchemeKind::copacr, SchemeKind::scoracp,
            SchemeKind::crcp};
  return {scheme_from_string(arg)};
}

struct LoadedConfig {
  ParsedConfig parsed;
  std::string digest;  // hash of the file as parsed, before CLI overrides
};

LoadedConfig load_config(const std::string& path) {
  LoadedConfig lc;
  lc.parsed = parse_config(read_file(path));
  lc.digest = config_digest(lc.parsed);
  return lc;
}

ordered_json report_json(const SchemeReport& r) {
  ordered_json j;
  j["scheme"] = std::string(to_string(r.scheme));
  j["E_D"] = num9(r.mean_distortion);
  j["RSNR_dB"] = num9(r.rsnr_dB);
  ordered_json solver = ordered_json::object();
  auto put = [&](const char* key, double v) {
    if (!std::isnan(v)) solver[key] = num9(v);
  };
  put("lambda", r.lambda);
  put("log_lambda", r.log_lambda);
  put("achieved_power", r.achieved_power);
  put("rate_star", r.rate_star);
  put("threshold_q", r.threshold_q);
  put("outage_alpha", r.outage_alpha);
  if (r.scheme == SchemeKind::copacr || r.scheme == SchemeKind::crcp)
    solver["grid_unimodal"] = r.grid_unimodal;
  j["solver"] = solver;
  return j;
}

// ---------------------------------------------------------------------------
// eval: closed-form evaluation at one operating point.

struct EvalOpts {
  std::string config;
  std::string scheme = "all";
  std::string out = "-";
  double power_dB = 0.0;
  bool power_set = false;
  unsigned long long seed = 0;
  bool seed_set = false;
};

int cmd_eval(const EvalOpts& o, const std::string& command) {
  LoadedConfig lc = load_config(o.config);
  ParsedConfig pc = lc.parsed;
  if (o.seed_set) pc.seed = o.seed;
  if (o.power_set) {
    pc.p_bar_dB = o.power_dB;
    pc.cfg.avg_power = std::pow(10.0, o.power_dB / 10.0);
  }
  pc.cfg.validate();

  ordered_json doc;
  const auto kinds = schemes_from_arg(o.scheme);
  if (kinds.size() == 1) {
    doc = report_json(evaluate_scheme(kinds[0], pc.source, pc.cfg));
  } else {
    ordered_json reports = ordered_json::array();
    for (SchemeKind k : kinds)
      reports.push_back(report_json(evaluate_scheme(k, pc.source, pc.cfg)));
    doc["reports"] = reports;
  }
  doc["manifest"] = make_manifest(command, lc.digest, pc.seed);
  write_out(o.out, dump_doc(doc) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// sweep: closed-form curves over a dB power grid.

struct SweepOpts {
  std::string config;
  std::string scheme = "all";
  std::string range;
  std::string out = "-";
  unsigned long long seed = 0;
  bool seed_set = false;
};

std::vector<double> parse_range(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char tail = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3)
    throw ConfigError("sweep: range must be 'lo:hi:step' in dB, got '" + spec +
                      "'");
  if (!(step > 0.0)) throw ConfigError("sweep: range step must be positive");
  if (hi < lo) throw ConfigError("sweep: range upper bound below lower bound");
  std::vector<double> grid;
  for (double p = lo; p <= hi + 1e-9; p += step) grid.push_back(p);
  return grid;
}

int cmd_sweep(const SweepOpts& o, const std::string& command) {
  LoadedConfig lc = load_config(o.config);
  ParsedConfig pc = lc.parsed;
  if (o.seed_set) pc.seed = o.seed;
  const auto grid = parse_range(o.range);
  const auto kinds = schemes_from_arg(o.scheme);

  std::string csv = manifest_comments(make_manifest(command, lc.digest, pc.seed));
  csv += "power_dB,E_D,RSNR_dB,scheme,K,b,B_max\n";
  for (SchemeKind k : kinds) {
    SystemConfig cfg = pc.cfg;
    for (double p_dB : grid) {
      cfg.avg_power = std::pow(10.0, p_dB / 10.0);
      const auto r = evaluate_scheme(k, pc.source, cfg);
      csv += fmt9(p_dB) + "," + fmt9(r.mean_distortion) + "," +
             fmt9(r.rsnr_dB) + "," + std::string(to_string(k)) + "," +
             std::to_string(cfg.frame_blocks) + "," +
             fmt9(cfg.bandwidth_ratio) + "," + fmt9(cfg.buffer_cap) + "\n";
    }
  }
  write_out(o.out, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// simulate: Monte Carlo verification of the closed form.

struct SimulateOpts {
  std::string config;
  std::string scheme;
  std::string out = "-";
  long long trials = 1000000;
  unsigned long long seed = 0;
  bool seed_set = false;
};

int cmd_simulate(const SimulateOpts& o, const std::string& command) {
  if (o.trials < 10000)
    throw ConfigError("simulate: trials must be at least 10000");
  LoadedConfig lc = load_config(o.config);
  ParsedConfig pc = lc.parsed;
  if (o.seed_set) pc.seed = o.seed;

  const SchemeKind kind = scheme_from_string(o.scheme);
  const SchemeReport closed = evaluate_scheme(kind, pc.source, pc.cfg);
  const auto policy = make_scheme_policy(kind, pc.source, pc.cfg);
  oracle::McConfig mc;
  mc.trials = o.trials;
  mc.seed = pc.seed;
  const auto rep = oracle::simulate(policy, pc.source, pc.cfg, mc);

  const double delta = rep.mean_distortion - closed.mean_distortion;
  const double z = rep.std_error > 0.0
                       ? delta / rep.std_error
                       : (delta == 0.0 ? 0.0 : kInf);
  ordered_json doc;
  doc["scheme"] = std::string(to_string(kind));
  doc["trials"] = o.trials;
  doc["seed"] = pc.seed;
  ordered_json mcj;
  mcj["mean_distortion"] = num9(rep.mean_distortion);
  mcj["std_error"] = num9(rep.std_error);
  mcj["mean_power"] = num9(rep.mean_power);
  mcj["std_error_power"] = num9(rep.std_error_power);
  mcj["outage_rate"] = num9(rep.outage_rate);
  doc["mc"] = mcj;
  ordered_json cj;
  cj["E_D"] = num9(closed.mean_distortion);
  cj["RSNR_dB"] = num9(closed.rsnr_dB);
  doc["closed_form"] = cj;
  doc["delta"] = num9(delta);
  doc["z_score"] = num9(z);
  doc["agreement"] = std::abs(delta) <= 3.0 * rep.std_error;
  doc["manifest"] = make_manifest(command, lc.digest, pc.seed);
  write_out(o.out, dump_doc(doc) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// tables: computed scaling-law quantities against their reference values.

struct TablesOpts {
  std::string config;
  std::string which;
  std::string out = "-";
};

struct TableRow {
  std::string table;
  double b;
  std::string quantity;
  double computed;
  double reference;
};

// Reference values for the side-by-side comparison columns.
// Rate-fit lines, b in {1, 2, 4, 6, 8}:
constexpr double kRefR1[] = {0.90, 0.89, 0.88, 0.87, 0.86};
constexpr double kRefR0[] = {-1.83, -2.39, -3.03, -3.41, -3.68};
constexpr double kRefRt1[] = {0.50, 0.33, 0.20, 0.14, 0.11};
constexpr double kRefRt0[] = {-0.19, 0.20, 0.32, 0.31, 0.29};
// Power gains at 40 dB and at 45 dB, b in {1, 2, 4, 6}:
constexpr double kRefG1At40[] = {5.27, 5.74, 6.02, 6.10};
constexpr double kRefG2At40[] = {-0.008, 9.78, 17.46, 19.93};
constexpr double kRefG3At40[] = {-28.34, -24.97, -19.45, -17.67};
constexpr double kRefG1At45[] = {5.84, 6.39, 6.76, 6.87};
constexpr double kRefG2At45[] = {-0.05, 11.91, 21.00, 23.95};
constexpr double kRefG3At45[] = {-32.27, -27.47, -20.71, -18.50};

int cmd_tables(const TablesOpts& o, const std::string& command) {
  if (o.which != "T1" && o.which != "T3" && o.which != "T4" && o.which != "T5")
    throw ConfigError("tables: --which must be one of T1, T3, T4, T5");
  LoadedConfig lc = load_config(o.config);
  const SourceModel& src = lc.parsed.source;

  // The tabulated quantities are asymptotic: the buffer is unbounded and the
  // power grid is fixed by the fits, whatever the config says.
  SystemConfig base = lc.parsed.cfg;
  base.buffer_cap = kInf;
  base.avg_power = 1.0;

  std::vector<TableRow> rows;
  using namespace asymptotics;
  auto fit = [&](SchemeKind k, double b) {
    SystemConfig cfg = base;
    cfg.bandwidth_ratio = b;
    return fit_multiplexing_gain(k, src, cfg, default_fit_grid(k));
  };

  if (o.which == "T1") {
    const double bs[] = {1, 2, 4, 6, 8};
    for (int i = 0; i < 5; ++i) {
      const auto fco = fit(SchemeKind::copacr, bs[i]);
      const auto fcr = fit(SchemeKind::crcp, bs[i]);
      rows.push_back({"T1", bs[i], "r1", fco.slope, kRefR1[i]});
      rows.push_back({"T1", bs[i], "r0", fco.intercept, kRefR0[i]});
      rows.push_back({"T1", bs[i], "rt1", fcr.slope, kRefRt1[i]});
      rows.push_back({"T1", bs[i], "rt0", fcr.intercept, kRefRt0[i]});
    }
  } else if (o.which == "T3" || o.which == "T4") {
    const bool at40 = o.which == "T3";
    const double p2 = std::pow(10.0, (at40 ? 40.0 : 45.0) / 10.0);
    const double bs[] = {1, 2, 4, 6};
    for (int i = 0; i < 4; ++i) {
      SystemConfig cfg = base;
      cfg.bandwidth_ratio = bs[i];
      const auto fco = fit(SchemeKind::copacr, bs[i]);
      const auto fcr = fit(SchemeKind::crcp, bs[i]);
      const auto g1 = power_gain_formula(GainKind::g1, src, cfg, p2, &fco, nullptr);
      const auto g2 = power_gain_formula(GainKind::g2, src, cfg, p2, &fco, nullptr);
      const auto g3 = power_gain_formula(GainKind::g3, src, cfg, p2, nullptr, &fcr);
      rows.push_back({o.which, bs[i], "G1", g1.gain_dB,
                      at40 ? kRefG1At40[i] : kRefG1At45[i]});
      rows.push_back({o.which, bs[i], "G2", g2.gain_dB,
                      at40 ? kRefG2At40[i] : kRefG2At45[i]});
      rows.push_back({o.which, bs[i], "G3", g3.gain_dB,
                      at40 ? kRefG3At40[i] : kRefG3At45[i]});
    }
  } else {  // T5: mean-distortion exponents
    const double bs[] = {1, 2, 4, 6, 8};
    for (int i = 0; i < 5; ++i) {
      SystemConfig cfg = base;
      cfg.bandwidth_ratio = bs[i];
      const double refs[] = {bs[i], bs[i] * kRefR1[i], 1.0,
                             bs[i] / (bs[i] + 1.0)};
      const SchemeKind kinds[] = {SchemeKind::scorpa, SchemeKind::copacr,
                                  SchemeKind::scoracp, SchemeKind::crcp};
      for (int s = 0; s < 4; ++s) {
        const double e =
            estimate_exponent(kinds[s], src, cfg, BufferMode::unbounded);
        rows.push_back({"T5", bs[i], std::string(to_string(kinds[s])), e,
                        refs[s]});
      }
    }
  }

  std::string csv =
      manifest_comments(make_manifest(command, lc.digest, lc.parsed.seed));
  csv += "table,b,quantity,computed,reference,abs_delta\n";
  for (const auto& r : rows)
    csv += r.table + "," + fmt9(r.b) + "," + r.quantity + "," +
           fmt9(r.computed) + "," + fmt9(r.reference) + "," +
           fmt9(std::abs(r.computed - r.reference)) + "\n";
  write_out(o.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rate/power adaptation policies for delay-limited transmission "
               "of a quasi-stationary source over a block-fading channel"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  const std::string command = join_args(argc, argv);

  EvalOpts eo;
  auto* eval = app.add_subcommand("eval", "Closed-form evaluation at one point");
  eval->add_option("--config", eo.config, "Config JSON path")->required();
  eval->add_option("--scheme", eo.scheme,
                   "scorpa|copacr|scoracp|crcp|all (default all)");
  auto* epow = eval->add_option("--power-dB", eo.power_dB,
                                "Override the config power constraint (dB)");
  auto* eseed = eval->add_option("--seed", eo.seed, "Override the config seed");
  eval->add_option("--out", eo.out, "Output path ('-' = stdout)");

  SweepOpts so;
  auto* sweep = app.add_subcommand("sweep", "Closed-form curves over a power grid");
  sweep->add_option("--config", so.config, "Config JSON path")->required();
  sweep->add_option("--scheme", so.scheme,
                    "scorpa|copacr|scoracp|crcp|all (default all)");
  sweep->add_option("--power-dB-range", so.range, "Grid 'lo:hi:step' in dB")
      ->required();
  auto* sseed = sweep->add_option("--seed", so.seed, "Override the config seed");
  sweep->add_option("--out", so.out, "Output path ('-' = stdout)");

  SimulateOpts mo;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of the closed form");
  sim->add_option("--config", mo.config, "Config JSON path")->required();
  sim->add_option("--scheme", mo.scheme, "scorpa|copacr|scoracp|crcp")->required();
  sim->add_option("--trials", mo.trials, "Trial count (default 1000000)");
  auto* mseed = sim->add_option("--seed", mo.seed, "Override the config seed");
  sim->add_option("--out", mo.out, "Output path ('-' = stdout)");

  TablesOpts to;
  auto* tab = app.add_subcommand("tables", "Scaling-law tables vs reference values");
  tab->add_option("--config", to.config, "Config JSON path")->required();
  tab->add_option("--which", to.which, "T1|T3|T4|T5")->required();
  tab->add_option("--out", to.out, "Output path ('-' = stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      eo.power_set = epow->count() > 0;
      eo.seed_set = eseed->count() > 0;
      return cmd_eval(eo, command);
    }
    if (sweep->parsed()) {
      so.seed_set = sseed->count() > 0;
      return cmd_sweep(so, command);
    }
    if (sim->parsed()) {
      mo.seed_set = mseed->count() > 0;
      return cmd_simulate(mo, command);
    }
    if (tab->parsed()) return cmd_tables(to, command);
  } catch (const ConfigError& e) {
    std::cerr << "qsfl: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qsfl: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
