#pragma once

// CSV tables, run manifests and plot scripts.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oso/config.hpp"
#include "oso/mcengine.hpp"

namespace oso {

inline constexpr std::string_view kRateCsvHeader =
    "K,gamma_thr_db,mean_rate_pu,mean_rate_su_total,mean_sum_rate,ci95_sum,activation_rate";

/// Header plus one row per (gamma_thr_db, K), values at 6 significant digits.
/// Throws DomainError for an empty table.
std::string format_csv(const ResultTable& table);
/// Throws IoError when the file cannot be written.
void emit_csv(const ResultTable& table, const std::filesystem::path& path);

/// Reads a rate CSV back. Only the columns present in the file are filled.
ResultTable parse_csv(std::istream& in);

/// CDF of beta in dB on a fixed grid, one column per K.
std::string format_beta_cdf_csv(std::span<const BetaDistribution> cdfs);
std::string format_bound_csv(const ErgodicBound& bound);
std::string format_fairness_csv(std::span<const FairnessComparison> rows);

void write_text(const std::filesystem::path& path, std::string_view text);

struct RunManifest {
  std::string name;
  std::string version;
  ExperimentConfig config;
  std::string started;
  std::string finished;
  unsigned workers = 1;
  std::vector<std::filesystem::path> outputs;
  std::vector<std::string> warnings;
};

std::string format_manifest(const RunManifest& m);
void write_manifest(const RunManifest& m, const std::filesystem::path& path);
/// The config echoed in a manifest ("config.<key>=..." lines).
ExperimentConfig read_manifest_config(const std::filesystem::path& path);

/// Standalone matplotlib script plotting the given CSVs. Missing CSVs are
/// skipped and reported in the returned warnings.
std::vector<std::string> emit_plotscript(std::span<const std::filesystem::path> csv_paths,
                                         std::string_view preset, const std::filesystem::path& out);

}  // namespace oso
