// End-to-end tests of the command-line tool, driven through the real binary
// (path supplied by the QSFL_CLI environment variable).
#include <doctest.h>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qsfl/model.hpp"
#include "qsfl/schemes.hpp"
#include "test_util.hpp"

using nlohmann::json;
using namespace qsfl;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* p = std::getenv("QSFL_CLI");
  REQUIRE_MESSAGE(p != nullptr, "QSFL_CLI must point at the built binary");
  return p;
}

CliResult run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

std::string u_b4_config() {
  return write_config(
      "qsfl_cli_u_b4.json",
      R"({"source": "U", "K": 2, "b": 1, "B_max": 4, "P_bar_dB": 10, "seed": 7})");
}

std::string u_inf_config() {
  return write_config(
      "qsfl_cli_u_inf.json",
      R"({"source": "U", "K": 2, "b": 1, "B_max": "inf", "P_bar_dB": 10})");
}

// Splits a CSV document into manifest comment lines and data lines.
struct Csv {
  std::vector<std::string> comments;
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv csv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = line;
    } else {
      std::vector<std::string> fields;
      std::istringstream ls(line);
      std::string field;
      while (std::getline(ls, field, ',')) fields.push_back(field);
      csv.rows.push_back(fields);
    }
  }
  return csv;
}

bool is_hex16(const std::string& s) {
  if (s.size() != 16) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c)) && !(c >= 'a' && c <= 'f'))
      return false;
  return true;
}

}  // namespace

TEST_CASE("eval emits the closed form with solver diagnostics and manifest") {
  const std::string cfg = u_b4_config();
  auto r = run_cli("eval --config " + cfg + " --scheme scorpa");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);

  CHECK(doc["scheme"] == "scorpa");
  CHECK(rel_err(doc["E_D"].get<double>(), 3.0142093398430951) < 1e-7);
  CHECK(rel_err(doc["solver"]["lambda"].get<double>(), 0.42777423968313538) <
        1e-7);
  CHECK(doc["solver"].contains("log_lambda"));
  CHECK(doc["manifest"]["tool_version"].is_string());
  CHECK(doc["manifest"]["seed"] == 7);
  CHECK(is_hex16(doc["manifest"]["config_digest"].get<std::string>()));

  // The digest is a pure function of the config file.
  auto r2 = run_cli("eval --config " + cfg + " --scheme copacr");
  REQUIRE(r2.exit_code == 0);
  const json doc2 = json::parse(r2.out);
  CHECK(doc2["manifest"]["config_digest"] == doc["manifest"]["config_digest"]);
  CHECK(doc2["solver"].contains("rate_star"));
  CHECK(doc2["solver"].contains("threshold_q"));
  CHECK(doc2["solver"]["grid_unimodal"].get<bool>());
}

TEST_CASE("eval at high power drives every scheme to the buffer RSNR cap") {
  const std::string cfg = u_b4_config();
  auto r = run_cli("eval --config " + cfg + " --scheme all --power-dB 60");
  REQUIRE(r.exit_code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc["reports"].size() == 4);
  const double cap = 13.214616762370532;  // full-buffer water-fill RSNR
  for (const auto& rep : doc["reports"]) {
    const double rsnr = rep["RSNR_dB"].get<double>();
    CHECK(rsnr <= cap + 1e-6);
    CHECK(cap - rsnr < 0.1);
  }
}

TEST_CASE("invalid inputs exit with the config error code") {
  const std::string bad = write_config("qsfl_cli_bad.json", "{not json");
  CHECK(run_cli("eval --config " + bad + " --scheme scorpa").exit_code == 2);
  CHECK(run_cli("eval --config /nonexistent/q.json --scheme scorpa").exit_code ==
        2);
  const std::string cfg = u_b4_config();
  CHECK(run_cli("eval --config " + cfg + " --scheme nosuch").exit_code == 2);
  const std::string b0 = write_config(
      "qsfl_cli_b0.json",
      R"({"source": "U", "K": 2, "b": 1, "B_max": 0, "P_bar_dB": 10})");
  CHECK(run_cli("eval --config " + b0 + " --scheme crcp").exit_code == 2);
  CHECK(run_cli("simulate --config " + cfg +
                " --scheme scorpa --trials 500").exit_code == 2);
  CHECK(run_cli("tables --config " + cfg + " --which T9").exit_code == 2);
  CHECK(run_cli("sweep --config " + cfg + " --power-dB-range 5:1:2").exit_code ==
        2);
  CHECK(run_cli("sweep --config " + cfg + " --power-dB-range 1:5:0").exit_code ==
        2);
}

TEST_CASE("sweep emits the documented CSV schema with monotone RSNR") {
  const std::string cfg = u_b4_config();
  auto r = run_cli("sweep --config " + cfg + " --power-dB-range 0:20:5");
  REQUIRE(r.exit_code == 0);
  const Csv csv = parse_csv(r.out);

  REQUIRE(csv.comments.size() == 5);
  CHECK(csv.comments[0].rfind("# command: ", 0) == 0);
  CHECK(csv.comments[1].rfind("# config_digest: ", 0) == 0);
  CHECK(csv.comments[2].rfind("# tool_version: ", 0) == 0);
  CHECK(csv.comments[3].rfind("# seed: ", 0) == 0);
  CHECK(csv.comments[4].rfind("# timestamp: ", 0) == 0);
  CHECK(csv.header == "power_dB,E_D,RSNR_dB,scheme,K,b,B_max");
  REQUIRE(csv.rows.size() == 4 * 5);  // four schemes, five grid points

  auto source = make_source_u();
  SystemConfig sys;
  sys.frame_blocks = 2;
  sys.bandwidth_ratio = 1.0;
  sys.buffer_cap = 4.0;
  double last_rsnr = -1e300;
  std::string last_scheme;
  for (const auto& row : csv.rows) {
    REQUIRE(row.size() == 7);
    CHECK(row[4] == "2");
    CHECK(row[5] == "1");
    CHECK(row[6] == "4");
    if (row[3] != last_scheme) {
      last_scheme = row[3];
      last_rsnr = -1e300;
    }
    const double rsnr = std::stod(row[2]);
    CHECK(rsnr >= last_rsnr);  // nondecreasing along each curve
    last_rsnr = rsnr;
    // Every row must agree with the library's closed form.
    sys.avg_power = std::pow(10.0, std::stod(row[0]) / 10.0);
    const auto rep = evaluate_scheme(scheme_from_string(row[3]), source, sys);
    CHECK(rel_err(std::stod(row[1]), rep.mean_distortion) < 1e-7);
    CHECK(std::abs(rsnr - rep.rsnr_dB) < 1e-6);
  }

  // An unbounded buffer renders as "inf" in the B_max column.
  auto r2 = run_cli("sweep --config " + u_inf_config() +
                    " --scheme crcp --power-dB-range 0:10:10");
  REQUIRE(r2.exit_code == 0);
  const Csv csv2 = parse_csv(r2.out);
  REQUIRE(csv2.rows.size() == 2);
  CHECK(csv2.rows[0][6] == "inf");
}

TEST_CASE("simulate is byte-deterministic and flags agreement") {
  const std::string cfg = u_b4_config();
  const std::string args =
      "simulate --config " + cfg + " --scheme scorpa --trials 20000 --seed 42";
  auto r1 = run_cli(args);
  auto r2 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(r1.out == r2.out);

  const json doc = json::parse(r1.out);
  CHECK(doc["trials"] == 20000);
  CHECK(doc["seed"] == 42);
  CHECK(doc["mc"]["outage_rate"].get<double>() == 0.0);  // never outages
  CHECK(doc["agreement"].get<bool>());
  CHECK(std::abs(doc["z_score"].get<double>()) <= 3.0);
  CHECK(rel_err(doc["closed_form"]["E_D"].get<double>(), 3.0142093398430951) <
        1e-7);
  const double delta = doc["mc"]["mean_distortion"].get<double>() -
                       doc["closed_form"]["E_D"].get<double>();
  CHECK(std::abs(delta - doc["delta"].get<double>()) < 1e-8);

  // A different seed draws different channels.
  auto r3 = run_cli("simulate --config " + cfg +
                    " --scheme scorpa --trials 20000 --seed 43");
  REQUIRE(r3.exit_code == 0);
  CHECK(json::parse(r3.out)["mc"]["mean_distortion"] !=
        doc["mc"]["mean_distortion"]);
}

TEST_CASE("tables report computed values beside references with deltas") {
  const std::string cfg = u_inf_config();

  auto t5 = run_cli("tables --config " + cfg + " --which T5");
  REQUIRE(t5.exit_code == 0);
  const Csv csv = parse_csv(t5.out);
  CHECK(csv.header == "table,b,quantity,computed,reference,abs_delta");
  REQUIRE(csv.rows.size() == 5 * 4);  // five bandwidth ratios, four schemes
  for (const auto& row : csv.rows) {
    REQUIRE(row.size() == 6);
    CHECK(row[0] == "T5");
    const double computed = std::stod(row[3]);
    const double reference = std::stod(row[4]);
    CHECK(std::abs(std::stod(row[5]) - std::abs(computed - reference)) < 1e-6);
    if (row[2] == "scorpa")  // exponent equals the bandwidth ratio
      CHECK(std::abs(computed - std::stod(row[1])) < 0.05 * std::stod(row[1]));
    if (row[2] == "scoracp" && row[1] != "1")  // constant power exponent is 1
      CHECK(std::abs(computed - 1.0) < 0.01);
  }

  auto t1 = run_cli("tables --config " + cfg + " --which T1");
  REQUIRE(t1.exit_code == 0);
  bool saw_b6_slope = false;
  for (const auto& row : parse_csv(t1.out).rows) {
    if (row[1] == "6" && row[2] == "rt1") {
      saw_b6_slope = true;
      CHECK(std::abs(std::stod(row[3]) - 0.14) < 0.03);
    }
    if (row[1] == "1" && row[2] == "r1")
      CHECK(std::abs(std::stod(row[3]) - 0.90) < 0.03);
  }
  CHECK(saw_b6_slope);

  auto t3 = run_cli("tables --config " + cfg + " --which T3");
  REQUIRE(t3.exit_code == 0);
  bool saw_b4_g1 = false;
  for (const auto& row : parse_csv(t3.out).rows) {
    if (row[1] == "4" && row[2] == "G1") {
      saw_b4_g1 = true;
      CHECK(std::abs(std::stod(row[3]) - 6.02) < 0.3);
    }
  }
  CHECK(saw_b4_g1);
}
