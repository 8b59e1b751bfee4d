#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oso/config.hpp"

namespace oso {

inline constexpr const char* kVersion = "0.1.0";

struct RunRequest {
  std::string label = "custom";  // preset name, used for the plot script
  std::vector<NamedConfig> runs;
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  bool plot_script = true;
};

struct RunOutcome {
  std::vector<std::filesystem::path> csvs;
  std::vector<std::filesystem::path> manifests;
  std::filesystem::path plot_script;
  std::vector<std::string> warnings;
};

/// Runs every config, writing CSVs plus a <name>.manifest per run and one
/// plot script. File names per mode:
///   simo_n1           <name>.csv, <name>_bound.csv
///   simo_maxn/mimo_n1 <name>.csv
///   conditioning      <name>_profile<i>.csv
///   beta_cdf          <name>_cdf.csv
///   fairness          <name>_fairness.csv
RunOutcome execute(const RunRequest& request);

}  // namespace oso
