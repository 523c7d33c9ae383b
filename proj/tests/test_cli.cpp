// SPDX-License-Identifier: Apache-2.0
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "hetcal/cli.hpp"
#include "hetcal/dataset_io.hpp"
#include "hetcal/synth.hpp"

using namespace hetcal;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "hetcal_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

fs::path write_config(const fs::path& dir, const ordered_json& j) {
  const fs::path p = dir / "config.json";
  spit(p, j.dump(2));
  return p;
}

ordered_json deterministic_config() {
  return ordered_json{{"version", 1},
                      {"scenario", {{"deterministic", true}, {"n_repeats", 1}}}};
}

bool same_bytes(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

}  // namespace

TEST_CASE("help output matches the golden files") {
  const fs::path data = HETCAL_TEST_DATA_DIR;
  RunResult r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out == slurp(data / "help_golden.txt"));

  r = run({"--help-all"});
  CHECK(r.code == 0);
  CHECK(r.out == slurp(data / "help_all_golden.txt"));
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"simulate", "--no-such-flag"}).code == 1);
  CHECK(run({"enbw"}).code == 1);  // missing required positional
}

TEST_CASE("simulate then estimate recovers the ground truth (deterministic)") {
  const fs::path dir = temp_dir("roundtrip");
  const fs::path cfg = write_config(dir, deterministic_config());

  const RunResult sim = run({"simulate", "--config", cfg.string(), "--out",
                             (dir / "data").string()});
  REQUIRE(sim.code == 0);
  REQUIRE(fs::exists(dir / "data" / "dataset_000.json"));
  REQUIRE(fs::exists(dir / "data" / "tonecal.json"));

  const RunResult est = run({"estimate", (dir / "data" / "dataset_000.json").string(),
                             "--tonecal", (dir / "data" / "tonecal.json").string(),
                             "--out", (dir / "est").string()});
  CHECK(est.code == 0);
  CHECK(est.out.find("eta = 0.345000") != std::string::npos);

  // the minimal config filled the documented defaults
  const ordered_json ds = parse_json_file(dir / "data" / "dataset_000.json");
  CHECK(ds.at("esa").at("n_avg").get<int>() == 100);
  CHECK(ds.at("esa").at("filter_family").get<std::string>() == "gaussian");
  CHECK(ds.at("esa").at("n_bins").get<int>() == 2001);

  const ordered_json report = parse_json_file(dir / "est" / "estimate.json");
  CHECK(report.at("eta").get<double>() == doctest::Approx(0.345).epsilon(1e-6));
  CHECK(report.at("k").get<double>() == 2.0);
  CHECK(report.at("budget").contains("rel_p_alpha"));
  CHECK(report.at("budget").contains("rel_enbw"));
  CHECK(report.at("budget").contains("rel_x"));
  CHECK(report.at("budget").contains("rel_type_b"));
}

TEST_CASE("validate reports the round-trip error") {
  const fs::path dir = temp_dir("validate");
  const fs::path cfg = write_config(dir, deterministic_config());
  const RunResult val =
      run({"validate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(val.code == 0);
  CHECK(val.out.find("eta_true = 0.345000") != std::string::npos);
  const ordered_json report = parse_json_file(dir / "validate.json");
  CHECK(report.at("rel_error").get<double>() < 1e-3);
  CHECK(report.at("agree").get<bool>());
}

TEST_CASE("enbw subcommand on a rectangular tone trace") {
  const fs::path dir = temp_dir("enbw");
  EsaConfig cfg;
  cfg.center_hz = 20e6;
  cfg.span_hz = 10e6;
  cfg.rbw_hz = 1e6;
  cfg.n_bins = 2001;
  cfg.filter_family = FilterFamily::rectangular;
  ToneCalRecord rec;
  rec.trace = synthesize_tone_cal_trace(cfg, 20e6, 1.0, 1e-12, nullptr);
  rec.rbw_hz = cfg.rbw_hz;
  rec.reference_power = 1.0;
  rec.tone_hz = 20e6;
  save_tone_cal(rec, dir / "tone.json");

  const RunResult r = run({"enbw", (dir / "tone.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("ENBW = 1.000000 MHz") != std::string::npos);
}

TEST_CASE("estimate without a tone exits 3 and names the SNR precondition") {
  const fs::path dir = temp_dir("notone");
  ordered_json cfg = deterministic_config();
  cfg["scenario"]["fields"] = {{"signal_power_w", 0.0}};
  const fs::path cfg_path = write_config(dir, cfg);
  REQUIRE(run({"simulate", "--config", cfg_path.string(), "--out", dir.string()}).code ==
          0);
  const RunResult est = run({"estimate", (dir / "dataset_000.json").string()});
  CHECK(est.code == 3);
  CHECK(est.err.find("insufficient SNR") != std::string::npos);
}

TEST_CASE("config invariant violations exit 2 and name the fields") {
  const fs::path dir = temp_dir("badcfg");

  ordered_json imbalance = deterministic_config();
  imbalance["scenario"]["receiver"] = {{"delta_tau", 0.6}};
  RunResult r = run({"validate", "--config", write_config(dir, imbalance).string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("delta_tau") != std::string::npos);
  CHECK(r.err.find("4*delta_tau^2 <= 1") != std::string::npos);

  ordered_json offspan = deterministic_config();
  offspan["scenario"]["fields"] = {{"if_hz", 40e6}};
  r = run({"validate", "--config", write_config(dir, offspan).string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("if_hz") != std::string::npos);
  CHECK(r.err.find("esa") != std::string::npos);

  spit(dir / "broken.json", "{ not json");
  r = run({"validate", "--config", (dir / "broken.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("parse") != std::string::npos);

  r = run({"validate", "--config", (dir / "missing.json").string()});
  CHECK(r.code == 2);
}

TEST_CASE("subcommands are deterministic: identical bytes on re-run") {
  const fs::path dir = temp_dir("determinism");
  ordered_json cfg = ordered_json{
      {"version", 1},
      {"scenario", {{"n_repeats", 2}, {"seed", 99}}},
      {"sweep", {{"axis", "attenuation"}, {"points", {1.0, 0.1}}}},
      {"budget", {{"components", {0.0075, 0.003, 0.002}}, {"type_b_rel", 0.005}}}};
  const fs::path cfg_path = write_config(dir, cfg);

  for (const char* name : {"a", "b"}) {
    const fs::path out = dir / name;
    REQUIRE(run({"simulate", "--config", cfg_path.string(), "--out", out.string()}).code ==
            0);
    REQUIRE(run({"sweep", "--config", cfg_path.string(), "--out",
                 (out / "sweep").string()}).code == 0);
    REQUIRE(run({"validate", "--config", cfg_path.string(), "--out",
                 (out / "val").string()}).code == 0);
    REQUIRE(run({"budget", "--config", cfg_path.string(), "--out",
                 (out / "budget").string()}).code == 0);
  }
  for (const char* f : {"dataset_000.json", "dataset_001.json", "tonecal.json"}) {
    CHECK(same_bytes(dir / "a" / f, dir / "b" / f));
  }
  CHECK(same_bytes(dir / "a" / "sweep" / "sweep.csv", dir / "b" / "sweep" / "sweep.csv"));
  CHECK(same_bytes(dir / "a" / "sweep" / "sweep.json", dir / "b" / "sweep" / "sweep.json"));
  CHECK(same_bytes(dir / "a" / "val" / "validate.json", dir / "b" / "val" / "validate.json"));
  CHECK(same_bytes(dir / "a" / "budget" / "budget.json",
                   dir / "b" / "budget" / "budget.json"));
}

TEST_CASE("budget subcommand arithmetic") {
  const fs::path dir = temp_dir("budget");
  const ordered_json cfg{
      {"version", 1},
      {"budget", {{"components", {0.0075, 0.003, 0.002}}, {"type_b_rel", 0.005}}}};
  const RunResult r = run({"budget", "--config", write_config(dir, cfg).string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("combined (k=1): 0.832166 %") != std::string::npos);
  CHECK(r.out.find("combined with type B (k=1): 0.970824 %") != std::string::npos);
  CHECK(r.out.find("expanded (k=2): 1.941649 %") != std::string::npos);
}

TEST_CASE("seed and repeats overrides change the outputs") {
  const fs::path dir = temp_dir("overrides");
  const fs::path cfg = write_config(
      dir, ordered_json{{"version", 1}, {"scenario", {{"n_repeats", 1}}}});

  REQUIRE(run({"simulate", "--config", cfg.string(), "--seed", "1", "--out",
               (dir / "s1").string()}).code == 0);
  REQUIRE(run({"simulate", "--config", cfg.string(), "--seed", "2", "--out",
               (dir / "s2").string()}).code == 0);
  CHECK_FALSE(same_bytes(dir / "s1" / "dataset_000.json", dir / "s2" / "dataset_000.json"));

  REQUIRE(run({"simulate", "--config", cfg.string(), "--repeats", "3", "--out",
               (dir / "r3").string()}).code == 0);
  CHECK(fs::exists(dir / "r3" / "dataset_002.json"));
}
