#pragma once

// SIMO opportunistic spatial orthogonalization: MRC interference power,
// SINR and rate formulas, interference-margin test, secondary-user selection
// and the random-beamforming fairness mechanism.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "oso/chanlin.hpp"

namespace oso {

/// Linear transmit powers and noise power.
struct LinkPowers {
  double pu = 1.0;
  double su = 1.0;
  double noise = 1.0;
};

/// Throws DomainError unless all three powers are positive and finite.
void validate(const LinkPowers& p);

/// One fading block seen by the primary receiver: the primary link h_{1,1}
/// and the K candidate interference links h_{1,k}.
struct SimoNetwork {
  CVec direct;
  std::vector<CVec> cross_to_pu;
  LinkPowers powers;
};

struct SelectionDecision {
  /// 0-based positions into the candidate list, in selection order.
  std::vector<std::size_t> active_indices;
  /// |<h_{1,k}, h_{1,1}>|^2 / ||h_{1,1}||^2 for every candidate.
  std::vector<double> per_candidate_interference;
  /// Realized interference power at the primary receiver after MRC.
  double beta = 0.0;
  std::size_t n_star = 0;
};

/// |<h_cross, h_direct>|^2 / ||h_direct||^2. Throws DegenerateChannelError
/// when h_direct is zero.
double interference_power(const CVec& h_direct, const CVec& h_cross);

/// Primary SINR after MRC: ||h||^2 P1 / (N0 (1 + beta P2 / N0)).
double sinr_pu(const CVec& h_direct, double beta, const LinkPowers& p);

/// SINR degradation in dB caused by interference power beta.
double margin_db(double beta, double su_power, double noise);

/// Interference budget (gamma_thr - 1) N0 / P2, gamma_thr given in dB.
double interference_budget(double gamma_thr_db, const LinkPowers& p);

/// Selection on precomputed per-candidate interference values.
SelectionDecision select_single_su(std::span<const double> interference, double gamma_thr_db,
                                   const LinkPowers& p);
SelectionDecision select_max_n(std::span<const double> interference, double gamma_thr_db,
                               const LinkPowers& p);

/// At most one active SU: the candidate with the least interference, admitted
/// when its margin stays within gamma_thr_db. Ties go to the lowest index.
SelectionDecision select_single_su(const SimoNetwork& net, double gamma_thr_db);

/// Largest admissible set: the M least-interfering candidates whose summed
/// interference fits the budget.
SelectionDecision select_max_n(const SimoNetwork& net, double gamma_thr_db);

struct Interferer {
  CVec channel;
  double power;
};

/// SINR of a receiver that matches its own direct channel and treats every
/// interferer as noise.
double sinr_su(const CVec& h_direct, std::span<const Interferer> interferers, double signal_power,
               double noise);

/// log2(1 + sinr), bits per channel use.
double rate(double sinr);

/// H w with w = (sqrt(alpha), sqrt(1 - alpha) e^{j theta}); H must have two columns.
CVec apply_random_beam(const CMat& h, double alpha, double theta);

struct BeamWeights {
  double alpha = 1.0;
  double theta = 0.0;
};

/// Static multi-antenna primary transmitter with single-antenna candidates.
struct FairnessNetwork {
  CMat direct;  // L_r x 2
  std::vector<CVec> cross_to_pu;
  LinkPowers powers;
};

class FairnessState {
 public:
  explicit FairnessState(std::size_t candidates);

  void record(const BeamWeights& w, const SelectionDecision& d);
  void merge(const FairnessState& other);

  double alpha() const noexcept { return last_.alpha; }
  double theta() const noexcept { return last_.theta; }
  std::span<const std::uint64_t> activation_counts() const noexcept { return counts_; }
  std::uint64_t total_activations() const noexcept;
  std::size_t distinct_activated() const noexcept;
  /// (sum c)^2 / (n sum c^2) over all candidates; 0 when nobody was activated.
  double jain_index() const noexcept;

 private:
  BeamWeights last_;
  std::vector<std::uint64_t> counts_;
};

/// Replays the schedule on the static network, reselecting one SU per slot.
FairnessState fairness_experiment(const FairnessNetwork& net, std::span<const BeamWeights> schedule,
                                  double gamma_thr_db);

}  // namespace oso
