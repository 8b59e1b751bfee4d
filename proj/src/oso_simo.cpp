#include "oso/oso_simo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oso {

namespace {

std::vector<double> candidate_interference(const SimoNetwork& net) {
  std::vector<double> out;
  out.reserve(net.cross_to_pu.size());
  for (const auto& h : net.cross_to_pu) out.push_back(interference_power(net.direct, h));
  return out;
}

}  // namespace

void validate(const LinkPowers& p) {
  auto ok = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!ok(p.pu) || !ok(p.su) || !ok(p.noise))
    throw DomainError("link powers and noise must be positive and finite");
}

double interference_power(const CVec& h_direct, const CVec& h_cross) {
  const double direct_power = norm_sq(h_direct);
  if (!(direct_power > 0.0)) throw DegenerateChannelError("interference_power: zero direct channel");
  return std::norm(inner(h_cross, h_direct)) / direct_power;
}

double sinr_pu(const CVec& h_direct, double beta, const LinkPowers& p) {
  if (!(beta >= 0.0)) throw DomainError("sinr_pu: negative interference power");
  return norm_sq(h_direct) * p.pu / (p.noise * (1.0 + beta * p.su / p.noise));
}

double margin_db(double beta, double su_power, double noise) {
  if (!(beta >= 0.0)) throw DomainError("margin_db: negative interference power");
  return 10.0 * std::log10(1.0 + beta * su_power / noise);
}

double interference_budget(double gamma_thr_db, const LinkPowers& p) {
  const double gamma_thr = std::pow(10.0, gamma_thr_db / 10.0);
  return (gamma_thr - 1.0) * p.noise / p.su;
}

SelectionDecision select_single_su(std::span<const double> interference, double gamma_thr_db,
                                   const LinkPowers& p) {
  SelectionDecision d;
  d.per_candidate_interference.assign(interference.begin(), interference.end());
  if (interference.empty()) return d;

  // min_element returns the first minimum, i.e. the lowest index on ties.
  const auto best = std::min_element(interference.begin(), interference.end());
  if (margin_db(*best, p.su, p.noise) <= gamma_thr_db) {
    d.active_indices.push_back(static_cast<std::size_t>(best - interference.begin()));
    d.beta = *best;
    d.n_star = 1;
  }
  return d;
}

SelectionDecision select_max_n(std::span<const double> interference, double gamma_thr_db,
                               const LinkPowers& p) {
  SelectionDecision d;
  d.per_candidate_interference.assign(interference.begin(), interference.end());

  std::vector<std::size_t> order(interference.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return interference[a] < interference[b]; });

  // The cheapest M-subset is always the M smallest values, so the longest
  // admissible prefix of the sorted order is the maximum.
  const double budget = interference_budget(gamma_thr_db, p);
  double total = 0.0;
  for (std::size_t idx : order) {
    const double next = total + interference[idx];
    if (!(next <= budget)) break;
    total = next;
    d.active_indices.push_back(idx);
  }
  d.n_star = d.active_indices.size();
  d.beta = total;
  return d;
}

SelectionDecision select_single_su(const SimoNetwork& net, double gamma_thr_db) {
  return select_single_su(candidate_interference(net), gamma_thr_db, net.powers);
}

SelectionDecision select_max_n(const SimoNetwork& net, double gamma_thr_db) {
  return select_max_n(candidate_interference(net), gamma_thr_db, net.powers);
}

double sinr_su(const CVec& h_direct, std::span<const Interferer> interferers, double signal_power,
               double noise) {
  const double g = norm_sq(h_direct);
  if (!(g > 0.0)) throw DegenerateChannelError("sinr_su: zero direct channel");
  double interference = 0.0;
  for (const auto& i : interferers) interference += std::norm(inner(h_direct, i.channel)) * i.power / g;
  return g * signal_power / (noise + interference);
}

double rate(double sinr) {
  if (!(sinr >= 0.0)) throw DomainError("rate: SINR must be non-negative");
  return std::log2(1.0 + sinr);
}

CVec apply_random_beam(const CMat& h, double alpha, double theta) {
  if (h.cols() != 2) throw DimensionError("apply_random_beam: channel must have two columns");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("apply_random_beam: alpha outside [0, 1]");
  const CVec w{Complex(std::sqrt(alpha), 0.0), std::polar(std::sqrt(1.0 - alpha), theta)};
  return h * w;
}

FairnessState::FairnessState(std::size_t candidates) : counts_(candidates, 0) {}

void FairnessState::record(const BeamWeights& w, const SelectionDecision& d) {
  last_ = w;
  for (std::size_t idx : d.active_indices) ++counts_.at(idx);
}

void FairnessState::merge(const FairnessState& other) {
  if (other.counts_.size() != counts_.size())
    throw DimensionError("FairnessState::merge: candidate counts differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  last_ = other.last_;
}

std::uint64_t FairnessState::total_activations() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::size_t FairnessState::distinct_activated() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(counts_.begin(), counts_.end(), [](std::uint64_t c) { return c > 0; }));
}

double FairnessState::jain_index() const noexcept {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (auto c : counts_) {
    sum += static_cast<double>(c);
    sum_sq += static_cast<double>(c) * static_cast<double>(c);
  }
  if (sum_sq == 0.0) return 0.0;
  return sum * sum / (static_cast<double>(counts_.size()) * sum_sq);
}

FairnessState fairness_experiment(const FairnessNetwork& net, std::span<const BeamWeights> schedule,
                                  double gamma_thr_db) {
  FairnessState state(net.cross_to_pu.size());
  std::vector<double> interference(net.cross_to_pu.size());
  for (const auto& w : schedule) {
    const CVec equivalent = apply_random_beam(net.direct, w.alpha, w.theta);
    for (std::size_t k = 0; k < net.cross_to_pu.size(); ++k)
      interference[k] = interference_power(equivalent, net.cross_to_pu[k]);
    state.record(w, select_single_su(interference, gamma_thr_db, net.powers));
  }
  return state;
}

}  // namespace oso
