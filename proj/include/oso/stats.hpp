#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace oso {

inline constexpr double kZ95 = 1.96;

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  void merge(const CompensatedSum& other) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

struct Estimate {
  double mean = 0.0;
  double ci95 = 0.0;  // half-width
};

/// Streaming mean and normal-approximation 95% interval.
class MeanAccumulator {
 public:
  void add(double x) noexcept;
  void merge(const MeanAccumulator& other) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept;
  double sample_variance() const noexcept;
  double ci95() const noexcept;
  Estimate estimate() const noexcept { return {mean(), ci95()}; }

 private:
  std::uint64_t n_ = 0;
  double shift_ = 0.0;
  CompensatedSum sum_;
  CompensatedSum sum_sq_;
};

/// Sample mean and 1.96 s / sqrt(n). Throws InsufficientDataError below two samples.
Estimate summarize(std::span<const double> samples);

/// Half-width for the difference of two independent estimates.
double combined_ci(double ci_a, double ci_b) noexcept;

class EmpiricalCdf {
 public:
  /// Throws InsufficientDataError on an empty sample.
  explicit EmpiricalCdf(std::vector<double> samples);

  /// Fraction of samples <= x.
  double operator()(double x) const noexcept;
  /// Smallest sample with CDF >= p, p in (0, 1].
  double quantile(double p) const;
  std::span<const double> sorted_samples() const noexcept { return sorted_; }
  std::size_t size() const noexcept { return sorted_.size(); }

 private:
  std::vector<double> sorted_;
};

}  // namespace oso
