#pragma once

// Eigen-beamforming OSO for multi-antenna links: the primary transmits on its
// strongest eigen-channel, a secondary on the weakest eigen-channel of its
// interference link to the primary receiver.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "oso/chanlin.hpp"
#include "oso/oso_simo.hpp"

namespace oso {

struct MimoNetwork {
  CMat direct;
  std::vector<CMat> cross_to_pu;
  LinkPowers powers;
};

struct PuBeam {
  double gain = 0.0;  // largest singular value
  CVec tx_beam;       // v(1)
  CVec rx_direction;  // u(1)
};

/// Weakest eigen-channel of one candidate's interference link, projected on
/// the primary receive direction.
struct CandidateEigen {
  double leak_power = 0.0;  // lambda_min^2 |<u_pu, u_min>|^2
  double leak_gain = 0.0;   // lambda_min
  double condition_ratio = 0.0;  // lambda_min / lambda_max; 0 for a zero matrix
  CVec tx_beam;             // v_min
  CVec leak_direction;      // u_min
};

enum class SelectionStage { singular, margin };

struct SecondaryBeam {
  std::size_t index = 0;
  SelectionStage stage = SelectionStage::margin;
  CVec tx_beam;
  double leak_gain = 0.0;
  CVec leak_direction;
  double leak_power = 0.0;
};

struct BeamChoice {
  CVec pu_tx_beam;
  CVec pu_rx_direction;
  double pu_gain = 0.0;
  std::optional<SecondaryBeam> secondary;

  /// Interference power reaching the primary after its receive projection.
  double leak_power() const noexcept { return secondary ? secondary->leak_power : 0.0; }
};

inline constexpr double kDefaultRankTolerance = 1e-9;

PuBeam pu_beam(const CMat& h_direct);

CandidateEigen analyse_candidate(const CMat& h_cross, const CVec& pu_rx_direction);

/// (leak_power, tx_beam) of the weakest eigen-channel of h_cross.
struct Leakage {
  double leak_power;
  CVec tx_beam;
};
Leakage su_leakage(const CMat& h_cross, const CVec& pu_rx_direction);

/// lambda_pu^2 P1 / (leak P2 + N0)
double sinr_pu_mimo(double pu_gain, double leak_power, const LinkPowers& p);

/// Two-stage selection on analysed candidates: a singular candidate first
/// (lowest index), otherwise the least-leaking candidate if its margin fits.
BeamChoice select_su_two_stage(const PuBeam& pu, std::span<const CandidateEigen> candidates,
                               double gamma_thr_db, const LinkPowers& p,
                               double rank_tol = kDefaultRankTolerance);

BeamChoice select_su_two_stage(const MimoNetwork& net, double gamma_thr_db,
                               double rank_tol = kDefaultRankTolerance);

struct EffectiveLinks {
  CVec h_eff;  // H_su_direct f_2
  CVec h_int;  // H_pu_to_su f_1
};

/// Effective SIMO channels seen by the active secondary receiver.
/// Throws DomainError when the choice has no active secondary.
EffectiveLinks su_effective_links(const CMat& h_su_direct, const CMat& h_pu_to_su,
                                  const BeamChoice& choice);

/// SU SINR with the primary as the only interferer.
double sinr_su_mimo(const EffectiveLinks& links, const LinkPowers& p);

}  // namespace oso
