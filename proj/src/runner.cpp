#include "oso/runner.hpp"

#include <chrono>
#include <ctime>

#include "oso/error.hpp"
#include "oso/report.hpp"

namespace oso {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::filesystem::path> run_one(const NamedConfig& run, const std::filesystem::path& dir,
                                           unsigned workers) {
  const ExperimentConfig& cfg = run.config;
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& file, const std::string& text) {
    const auto path = dir / file;
    write_text(path, text);
    written.push_back(path);
  };

  switch (cfg.mode) {
    case Mode::simo_n1:
    case Mode::simo_maxn:
    case Mode::mimo_n1:
      emit(run.name + ".csv", format_csv(run_experiment(cfg, workers)));
      if (cfg.mode == Mode::simo_n1)
        emit(run.name + "_bound.csv", format_bound_csv(ergodic_upper_bound(cfg, workers)));
      break;
    case Mode::conditioning: {
      const auto results = conditioning_experiment(cfg, workers);
      for (std::size_t i = 0; i < results.size(); ++i)
        emit(run.name + "_profile" + std::to_string(i) + ".csv", format_csv(results[i].table));
      break;
    }
    case Mode::beta_cdf:
      emit(run.name + "_cdf.csv", format_beta_cdf_csv(beta_cdf(cfg, workers)));
      break;
    case Mode::fairness:
      emit(run.name + "_fairness.csv", format_fairness_csv(run_fairness(cfg, workers)));
      break;
  }
  return written;
}

}  // namespace

RunOutcome execute(const RunRequest& request) {
  std::error_code ec;
  std::filesystem::create_directories(request.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + request.out_dir.string() + ": " + ec.message());

  RunOutcome outcome;
  std::vector<RunManifest> manifests;
  for (const auto& run : request.runs) {
    RunManifest& m = manifests.emplace_back();
    m.name = run.name;
    m.version = kVersion;
    m.config = run.config;
    m.workers = resolve_workers(request.workers);
    m.started = utc_now();
    m.outputs = run_one(run, request.out_dir, request.workers);
    m.finished = utc_now();
    outcome.csvs.insert(outcome.csvs.end(), m.outputs.begin(), m.outputs.end());
  }

  if (request.plot_script) {
    outcome.plot_script = request.out_dir / ("plot_" + request.label + ".py");
    outcome.warnings = emit_plotscript(outcome.csvs, request.label, outcome.plot_script);
  }

  for (auto& m : manifests) {
    m.warnings = outcome.warnings;
    const auto path = request.out_dir / (m.name + ".manifest");
    write_manifest(m, path);
    outcome.manifests.push_back(path);
  }
  return outcome;
}

}  // namespace oso
