// oso_sim: batch front end for the OSO Monte Carlo experiments.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 config error, 3 numeric error, 4 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oso/config.hpp"
#include "oso/error.hpp"
#include "oso/report.hpp"
#include "oso/runner.hpp"

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

unsigned default_workers() {
  if (const char* env = std::getenv("OSO_SIM_WORKERS")) {
    try {
      return static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw oso::ConfigError(std::string("OSO_SIM_WORKERS: not a number '") + env + "'");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic spatial orthogonalization Monte Carlo simulator"};

  std::string preset;
  std::string config_path;
  std::string manifest_path;
  std::string out_dir = "out";
  std::string name = "run";
  unsigned workers = 0;
  bool no_plot = false;

  // Per-field overrides keep their raw text so errors can quote the flag.
  struct Flag {
    const char* option;
    const char* key;
    const char* help;
    std::string value;
  };
  std::vector<Flag> fields = {
      {"--mode", "mode", "simo_n1|simo_maxn|mimo_n1|fairness|conditioning|beta_cdf", {}},
      {"--K", "K", "candidate counts, comma separated", {}},
      {"--Lt", "Lt", "transmit antennas", {}},
      {"--Lr", "Lr", "receive antennas", {}},
      {"--gamma-thr-db", "gamma_thr_db", "interference margins in dB, comma separated", {}},
      {"--p1-db", "P1_over_N0_db", "primary P1/N0 in dB", {}},
      {"--p2-db", "P2_over_N0_db", "secondary P2/N0 in dB", {}},
      {"--trials", "trials", "Monte Carlo trials (fairness: schedule length)", {}},
      {"--seed", "seed", "64-bit seed", {}},
      {"--profiles", "profiles", "singular-value profiles, e.g. 1:1,1.407:0.141", {}},
      {"--bound-samples", "bound_samples", "samples for the ergodic bound", {}},
      {"--rank-tol", "rank_tol", "singularity tolerance on lambda_min/lambda_max", {}},
  };

  app.add_option("--preset", preset, "fig2|fig3|fig4|fig5|mimo-vs-simo|fairness");
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--from-manifest", manifest_path, "rerun the config echoed in a manifest");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--name", name, "run name for non-preset runs")->capture_default_str();
  app.add_option("--workers", workers, "worker threads (0 = all cores; default $OSO_SIM_WORKERS)");
  app.add_flag("--no-plot", no_plot, "skip the plot script");
  for (auto& f : fields) app.add_option(f.option, f.value, f.help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; malformed command lines count as config errors.
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    if (app.count("--workers") == 0) workers = default_workers();

    oso::ConfigEntries flags;
    for (const auto& f : fields)
      if (app.count(f.option) > 0) flags[f.key] = oso::ConfigEntry{f.value, f.option};

    oso::RunRequest request;
    request.out_dir = out_dir;
    request.workers = workers;
    request.plot_script = !no_plot;

    if (!preset.empty()) {
      oso::Preset p = oso::make_preset(preset);
      request.label = p.name;
      std::optional<oso::ConfigEntries> file;
      if (!config_path.empty()) file = oso::read_config_file(config_path);
      for (auto& run : p.runs) {
        oso::ConfigEntries entries = oso::to_entries(run.config, "preset " + p.name);
        if (file) oso::apply_overrides(entries, *file);
        oso::apply_overrides(entries, flags);
        run.config = oso::build_config(entries);
      }
      request.runs = std::move(p.runs);
    } else if (!manifest_path.empty()) {
      oso::ConfigEntries entries = oso::to_entries(oso::read_manifest_config(manifest_path), manifest_path);
      oso::apply_overrides(entries, flags);
      request.runs.push_back({name, oso::build_config(entries)});
    } else {
      std::optional<std::filesystem::path> file;
      if (!config_path.empty()) file = config_path;
      request.runs.push_back({name, oso::parse_config(file, flags)});
    }

    const oso::RunOutcome outcome = oso::execute(request);
    for (const auto& p : outcome.csvs) std::cout << p.string() << '\n';
    for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
    return kOk;
  } catch (const oso::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const oso::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const oso::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
