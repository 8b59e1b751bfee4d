#include "oso/stats.hpp"

#include <algorithm>
#include <cmath>

#include "oso/error.hpp"

namespace oso {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    compensation_ += (sum_ - t) + x;
  else
    compensation_ += (x - t) + sum_;
  sum_ = t;
}

void CompensatedSum::merge(const CompensatedSum& other) noexcept {
  add(other.sum_);
  add(other.compensation_);
}

// Sums are kept relative to a shift (the first value seen) so the variance
// does not cancel catastrophically when the spread is tiny next to the mean.
void MeanAccumulator::add(double x) noexcept {
  if (n_ == 0) shift_ = x;
  ++n_;
  const double d = x - shift_;
  sum_.add(d);
  sum_sq_.add(d * d);
}

void MeanAccumulator::merge(const MeanAccumulator& other) noexcept {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  // re-express the other side's sums relative to this shift
  const double delta = other.shift_ - shift_;
  const double s1 = other.sum_.value();
  const double n = static_cast<double>(other.n_);
  sum_.merge(other.sum_);
  sum_.add(n * delta);
  sum_sq_.merge(other.sum_sq_);
  sum_sq_.add(2.0 * delta * s1);
  sum_sq_.add(n * delta * delta);
  n_ += other.n_;
}

double MeanAccumulator::mean() const noexcept {
  return n_ == 0 ? 0.0 : shift_ + sum_.value() / static_cast<double>(n_);
}

double MeanAccumulator::sample_variance() const noexcept {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  const double m = sum_.value() / n;
  return std::max(0.0, (sum_sq_.value() - n * m * m) / (n - 1.0));
}

double MeanAccumulator::ci95() const noexcept {
  if (n_ < 2) return 0.0;
  return kZ95 * std::sqrt(sample_variance() / static_cast<double>(n_));
}

Estimate summarize(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientDataError("summarize: need at least two samples");
  CompensatedSum s;
  for (double x : samples) s.add(x);
  const double n = static_cast<double>(samples.size());
  const double mean = s.value() / n;
  CompensatedSum sq;
  for (double x : samples) sq.add((x - mean) * (x - mean));
  return {mean, kZ95 * std::sqrt(sq.value() / (n - 1.0) / n)};
}

double combined_ci(double ci_a, double ci_b) noexcept { return std::hypot(ci_a, ci_b); }

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw InsufficientDataError("EmpiricalCdf: empty sample");
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const noexcept {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalCdf::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("EmpiricalCdf::quantile: p outside (0, 1]");
  const auto n = static_cast<double>(sorted_.size());
  auto idx = static_cast<std::size_t>(std::ceil(p * n));
  if (idx == 0) idx = 1;
  return sorted_[std::min(idx, sorted_.size()) - 1];
}

}  // namespace oso
