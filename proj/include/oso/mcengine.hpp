#pragma once

// Monte Carlo experiment engine. Every trial draws its links from streams
// keyed by (seed, trial, link), and trials are reduced in fixed-size blocks
// merged in block order, so results do not depend on the worker count.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "oso/oso_mimo.hpp"
#include "oso/oso_simo.hpp"
#include "oso/stats.hpp"

namespace oso {

enum class Mode { simo_n1, simo_maxn, mimo_n1, fairness, conditioning, beta_cdf };

std::string_view to_string(Mode m) noexcept;
/// Throws ConfigError for unknown names.
Mode parse_mode(std::string_view name);

struct ExperimentConfig {
  Mode mode = Mode::simo_n1;
  std::vector<int> k_list;
  int lt = 1;
  int lr = 1;
  std::vector<double> gamma_thr_db;
  double p1_over_n0_db = 0.0;
  double p2_over_n0_db = 0.0;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  /// Singular-value profiles, conditioning mode only.
  std::vector<std::vector<double>> profiles;
  std::uint64_t bound_samples = 1'000'000;
  double rank_tol = kDefaultRankTolerance;

  /// Linear powers with N0 = 1. The only place dB powers become linear.
  LinkPowers link_powers() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws ConfigError describing the first invalid field or mode/dimension mismatch.
void validate(const ExperimentConfig& cfg);

struct CellKey {
  double gamma_thr_db;
  int k;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct TrialStats {
  double mean_rate_pu = 0.0;
  double mean_rate_su_total = 0.0;
  double mean_sum_rate = 0.0;
  double ci95_pu = 0.0;
  double ci95_su = 0.0;
  double ci95_sum = 0.0;
  double activation_rate = 0.0;
  double mean_active_sus = 0.0;
  std::uint64_t trials = 0;
};

/// Ordered by (gamma_thr_db, K).
using ResultTable = std::map<CellKey, TrialStats>;

/// 0 selects the hardware concurrency.
unsigned resolve_workers(unsigned requested) noexcept;

/// Rate sweep for simo_n1, simo_maxn and mimo_n1. Candidate pools are nested:
/// the first K candidates of a trial are shared by every larger K.
ResultTable run_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

struct ProfileResult {
  std::vector<double> profile;
  ResultTable table;
};

/// MIMO OSO with every link drawn at a fixed singular-value profile and
/// Haar-random singular vectors. Profiles share the same direction draws.
std::vector<ProfileResult> conditioning_experiment(const ExperimentConfig& cfg, unsigned workers = 1);

struct BetaDistribution {
  int k;
  EmpiricalCdf cdf;
};

/// Samples of the single-SU interference power beta_K for each K in k_list,
/// on nested candidate pools.
std::vector<BetaDistribution> beta_cdf(const ExperimentConfig& cfg, unsigned workers = 1);

struct ErgodicBound {
  Estimate pu;   // E log2(1 + ||h11||^2 P1/N0)
  Estimate su;   // SU ergodic rate with the PU as interferer
  Estimate sum;
};

/// Interference-free asymptote of the SIMO single-SU sweep, bound_samples draws.
ErgodicBound ergodic_upper_bound(const ExperimentConfig& cfg, unsigned workers = 1);

struct FairnessComparison {
  int k;
  double gamma_thr_db;
  std::uint64_t slots;
  FairnessState randomized;
  FairnessState constant;
};

/// One static network; `trials` pseudo-random (alpha, theta) slots against the
/// same number of slots with fixed (alpha, theta) = (1, 0).
std::vector<FairnessComparison> run_fairness(const ExperimentConfig& cfg, unsigned workers = 1);

struct DoublingSearch {
  int lr = 4;
  double epsilon = 0.01;
  double target = 0.99;
  std::uint64_t trials = 100'000;
  int max_k = 1 << 14;
  std::uint64_t seed = 0;
};

struct DoublingResult {
  std::optional<int> k_found;
  /// (K, estimated P(beta_K <= epsilon)) per doubling step.
  std::vector<std::pair<int, double>> steps;
};

/// Doubles K from 1 until P(beta_K <= epsilon) reaches the target.
DoublingResult beta_doubling_search(const DoublingSearch& s, unsigned workers = 1);

}  // namespace oso
