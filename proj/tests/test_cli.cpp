// Config parsing, CSV and manifest output, plot scripts and the oso_sim binary.

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "oso/config.hpp"
#include "oso/error.hpp"
#include "oso/report.hpp"
#include "oso/runner.hpp"

using namespace oso;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oso_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigEntries entries_from(const std::string& text) {
  std::istringstream in(text);
  return read_config_entries(in, "test.cfg");
}

std::string error_of(const ConfigEntries& e) {
  try {
    build_config(e);
  } catch (const ConfigError& err) {
    return err.what();
  }
  return {};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(OSO_SIM_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallConfig =
    "# small sweep\n"
    "mode=simo_n1\n"
    "K=1,3\n"
    "Lt=1\n"
    "Lr=4\n"
    "gamma_thr_db=1\n"
    "P1_over_N0_db=0\n"
    "P2_over_N0_db=0\n"
    "trials=2000\n"
    "seed=7\n"
    "bound_samples=5000\n";

}  // namespace

TEST_CASE("presets") {
  const Preset fig3 = make_preset("fig3");
  REQUIRE(fig3.runs.size() == 1);
  const ExperimentConfig& c = fig3.runs[0].config;
  CHECK(c.mode == Mode::simo_n1);
  CHECK(c.lr == 4);
  CHECK(c.lt == 1);
  CHECK(c.k_list.back() == 100);
  CHECK(c.gamma_thr_db == std::vector<double>{0.1, 0.5, 1.0});
  CHECK(c.p1_over_n0_db == 0.0);
  CHECK(c.p2_over_n0_db == 0.0);

  const Preset fig2 = make_preset("fig2");
  CHECK(fig2.runs[0].config.mode == Mode::beta_cdf);
  CHECK(fig2.runs[0].config.k_list.front() == 1);

  for (auto name : preset_names()) {
    const Preset p = make_preset(name);
    for (const auto& run : p.runs) {
      CHECK_NOTHROW(validate(run.config));
      CHECK(build_config(to_entries(run.config, "echo")) == run.config);
    }
  }
  CHECK_THROWS_AS(make_preset("fig9"), ConfigError);
}

TEST_CASE("config errors") {
  const std::string missing = error_of({});
  for (auto key : {"mode", "K", "Lt", "Lr", "gamma_thr_db", "P1_over_N0_db", "P2_over_N0_db", "trials", "seed"})
    CHECK(missing.find(key) != std::string::npos);

  const std::string unknown = error_of(entries_from(std::string(kSmallConfig) + "colour=blue\n"));
  CHECK(unknown.find("colour") != std::string::npos);
  CHECK(unknown.find("test.cfg:12") != std::string::npos);

  ConfigEntries e = entries_from(kSmallConfig);
  e["Lr"] = {"four", "--Lr"};
  const std::string bad = error_of(e);
  CHECK(bad.find("--Lr") != std::string::npos);
  CHECK(bad.find("four") != std::string::npos);

  CHECK_THROWS_AS(entries_from("mode\n"), ConfigError);
  CHECK_THROWS_AS(entries_from("K=1\nK=2\n"), ConfigError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/oso.cfg"), IoError);
}

TEST_CASE("flags override file values and dB converts once") {
  const fs::path dir = scratch("override");
  write_text(dir / "a.cfg", kSmallConfig);
  ConfigEntries flags;
  flags["Lr"] = {"2", "--Lr"};
  flags["P1_over_N0_db"] = {"10", "--p1-db"};
  const ExperimentConfig c = parse_config(dir / "a.cfg", flags);
  CHECK(c.lr == 2);
  CHECK(c.trials == 2000);
  CHECK(c.p1_over_n0_db == 10.0);
  CHECK(c.link_powers().pu == doctest::Approx(10.0));
  CHECK(c.link_powers().noise == 1.0);

  flags["gamma_thr_db"] = {"inf", "--gamma-thr-db"};
  CHECK(std::isinf(parse_config(dir / "a.cfg", flags).gamma_thr_db[0]));
}

TEST_CASE("serialize_config round-trips") {
  ExperimentConfig c = make_preset("fig5").runs[0].config;
  c.rank_tol = 3.3e-7;
  c.seed = 18446744073709551615ull;
  std::istringstream in(serialize_config(c));
  CHECK(build_config(read_config_entries(in, "echo")) == c);
}

TEST_CASE("CSV emission") {
  ResultTable single;
  single[CellKey{1.0, 40}] = TrialStats{2.123456789, 1.5, 3.623456789, 0.01, 0.02, 0.0312345, 0.75, 0.75, 10};
  const std::string text = format_csv(single);
  CHECK(text == std::string(kRateCsvHeader) + "\n40,1,2.12346,1.5,3.62346,0.0312345,0.75\n");
  CHECK_THROWS_AS(format_csv(ResultTable{}), DomainError);
  CHECK_THROWS_AS(emit_csv(single, "/nonexistent/dir/x.csv"), IoError);

  ExperimentConfig c = build_config(entries_from(kSmallConfig));
  c.gamma_thr_db = {1.0, 0.1};
  const ResultTable t = run_experiment(c, 2);
  const std::string a = format_csv(t);
  CHECK(a == format_csv(run_experiment(c, 3)));

  // rows sorted by (gamma, K)
  std::istringstream lines(a);
  std::string header, r1, r2, r3;
  std::getline(lines, header);
  std::getline(lines, r1);
  std::getline(lines, r2);
  std::getline(lines, r3);
  CHECK(r1.starts_with("1,0.1,"));
  CHECK(r2.starts_with("3,0.1,"));
  CHECK(r3.starts_with("1,1,"));

  std::istringstream back(a);
  const ResultTable parsed = parse_csv(back);
  REQUIRE(parsed.size() == t.size());
  for (const auto& [k, s] : t) {
    const TrialStats& p = parsed.at(k);
    CHECK(p.mean_rate_pu == doctest::Approx(s.mean_rate_pu).epsilon(5e-6));
    CHECK(p.mean_rate_su_total == doctest::Approx(s.mean_rate_su_total).epsilon(5e-6));
    CHECK(p.mean_sum_rate == doctest::Approx(s.mean_sum_rate).epsilon(5e-6));
    CHECK(p.ci95_sum == doctest::Approx(s.ci95_sum).epsilon(5e-6));
    CHECK(p.activation_rate == doctest::Approx(s.activation_rate).epsilon(5e-6));
  }
}

TEST_CASE("plot scripts") {
  const fs::path dir = scratch("plot");
  const std::vector<fs::path> none;
  CHECK(emit_plotscript(none, "fig3", dir / "empty.py").empty());
  const std::string empty = slurp(dir / "empty.py");
  CHECK(empty.starts_with("#!/usr/bin/env python3\n#"));
  CHECK(empty.find("import") == std::string::npos);

  write_text(dir / "fig3.csv", "x");
  write_text(dir / "fig3_bound.csv", "x");
  const std::vector<fs::path> csvs{dir / "fig3.csv", dir / "fig3_bound.csv", dir / "gone.csv"};
  const auto warnings = emit_plotscript(csvs, "fig3", dir / "plot.py");
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("gone.csv") != std::string::npos);
  const std::string script = slurp(dir / "plot.py");
  CHECK(script.find("plot_rates(\"fig3.csv\", \"fig3_bound.csv\")") != std::string::npos);
  CHECK(script.find("gone.csv") == std::string::npos);
}

TEST_CASE("runner writes manifests that reproduce every CSV") {
  const fs::path dir = scratch("runner");
  RunRequest req;
  req.label = "small";
  req.out_dir = dir / "first";
  req.workers = 2;
  req.runs.push_back({"small", build_config(entries_from(kSmallConfig))});
  const RunOutcome out = execute(req);
  REQUIRE(out.csvs.size() == 2);
  REQUIRE(out.manifests.size() == 1);
  CHECK(fs::exists(out.plot_script));

  const std::string manifest = slurp(out.manifests[0]);
  CHECK(manifest.find("output.0=small.csv") != std::string::npos);
  CHECK(manifest.find("output.1=small_bound.csv") != std::string::npos);
  CHECK(manifest.find("seed=7") != std::string::npos);
  CHECK(manifest.find("started=") != std::string::npos);
  CHECK(manifest.find("version=") != std::string::npos);

  const ExperimentConfig echoed = read_manifest_config(out.manifests[0]);
  CHECK(echoed == req.runs[0].config);

  RunRequest again = req;
  again.out_dir = dir / "second";
  again.workers = 5;
  again.runs[0].config = echoed;
  const RunOutcome out2 = execute(again);
  for (std::size_t i = 0; i < out.csvs.size(); ++i) CHECK(slurp(out.csvs[i]) == slurp(out2.csvs[i]));
}

TEST_CASE("oso_sim exit codes and reruns") {
  const fs::path dir = scratch("binary");
  write_text(dir / "ok.cfg", kSmallConfig);
  write_text(dir / "unknown.cfg", std::string(kSmallConfig) + "colour=blue\n");
  write_text(dir / "empty.cfg", "");

  CHECK(run_cli("--config " + (dir / "ok.cfg").string() + " --out " + (dir / "a").string() + " --name s") == 0);
  CHECK(fs::exists(dir / "a" / "s.csv"));
  CHECK(fs::exists(dir / "a" / "s.manifest"));

  CHECK(run_cli("--from-manifest " + (dir / "a" / "s.manifest").string() + " --workers 3 --out " +
                (dir / "b").string() + " --name s") == 0);
  CHECK(slurp(dir / "a" / "s.csv") == slurp(dir / "b" / "s.csv"));
  CHECK(slurp(dir / "a" / "s_bound.csv") == slurp(dir / "b" / "s_bound.csv"));

  CHECK(run_cli("--config " + (dir / "empty.cfg").string() + " --out " + (dir / "c").string()) == 2);
  CHECK(run_cli("--config " + (dir / "unknown.cfg").string() + " --out " + (dir / "c").string()) == 2);
  CHECK(run_cli("--preset nope --out " + (dir / "c").string()) == 2);
  CHECK(run_cli("--bogus-flag 3") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("--config " + (dir / "missing.cfg").string() + " --out " + (dir / "c").string()) == 4);
  CHECK(run_cli("--config " + (dir / "ok.cfg").string() + " --Lr x --out " + (dir / "c").string()) == 2);

  // output path blocked by a regular file
  write_text(dir / "blocked", "");
  CHECK(run_cli("--config " + (dir / "ok.cfg").string() + " --out " + (dir / "blocked").string()) == 4);

  // a zero primary power makes every SINR zero: rate is fine, but -inf dB is rejected as config
  CHECK(run_cli("--config " + (dir / "ok.cfg").string() + " --p1-db -inf --out " + (dir / "c").string()) == 2);
}
