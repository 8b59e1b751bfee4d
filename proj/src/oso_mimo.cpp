#include "oso/oso_mimo.hpp"

#include <array>
#include <cmath>

namespace oso {

PuBeam pu_beam(const CMat& h_direct) {
  SvdFactors f = svd_small(h_direct);
  return PuBeam{f.singular_values.front(), std::move(f.right_vectors.front()),
                std::move(f.left_vectors.front())};
}

CandidateEigen analyse_candidate(const CMat& h_cross, const CVec& pu_rx_direction) {
  SvdFactors f = svd_small(h_cross);
  const double top = f.singular_values.front();
  const double weakest = f.singular_values.back();

  CandidateEigen c{
      .leak_power = weakest * weakest * std::norm(inner(pu_rx_direction, f.left_vectors.back())),
      .leak_gain = weakest,
      .condition_ratio = top > 0.0 ? weakest / top : 0.0,
      .tx_beam = std::move(f.right_vectors.back()),
      .leak_direction = std::move(f.left_vectors.back()),
  };
  return c;
}

Leakage su_leakage(const CMat& h_cross, const CVec& pu_rx_direction) {
  CandidateEigen c = analyse_candidate(h_cross, pu_rx_direction);
  return {c.leak_power, std::move(c.tx_beam)};
}

double sinr_pu_mimo(double pu_gain, double leak_power, const LinkPowers& p) {
  if (!(pu_gain >= 0.0) || !(leak_power >= 0.0))
    throw DomainError("sinr_pu_mimo: gains must be non-negative");
  return pu_gain * pu_gain * p.pu / (leak_power * p.su + p.noise);
}

BeamChoice select_su_two_stage(const PuBeam& pu, std::span<const CandidateEigen> candidates,
                               double gamma_thr_db, const LinkPowers& p, double rank_tol) {
  BeamChoice choice{pu.tx_beam, pu.rx_direction, pu.gain, std::nullopt};

  auto activate = [&](std::size_t idx, SelectionStage stage) {
    const auto& c = candidates[idx];
    choice.secondary =
        SecondaryBeam{idx, stage, c.tx_beam, c.leak_gain, c.leak_direction, c.leak_power};
  };

  for (std::size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k].condition_ratio < rank_tol) {
      activate(k, SelectionStage::singular);
      return choice;
    }
  }

  if (candidates.empty()) return choice;
  std::size_t best = 0;
  for (std::size_t k = 1; k < candidates.size(); ++k)
    if (candidates[k].leak_power < candidates[best].leak_power) best = k;

  if (margin_db(candidates[best].leak_power, p.su, p.noise) <= gamma_thr_db)
    activate(best, SelectionStage::margin);
  return choice;
}

BeamChoice select_su_two_stage(const MimoNetwork& net, double gamma_thr_db, double rank_tol) {
  const PuBeam pu = pu_beam(net.direct);
  std::vector<CandidateEigen> candidates;
  candidates.reserve(net.cross_to_pu.size());
  for (const auto& h : net.cross_to_pu) {
    if (h.rows() != net.direct.rows() || h.cols() != net.direct.cols())
      throw DimensionError("select_su_two_stage: candidate channel shape differs from direct link");
    candidates.push_back(analyse_candidate(h, pu.rx_direction));
  }
  return select_su_two_stage(pu, candidates, gamma_thr_db, net.powers, rank_tol);
}

EffectiveLinks su_effective_links(const CMat& h_su_direct, const CMat& h_pu_to_su,
                                  const BeamChoice& choice) {
  if (!choice.secondary) throw DomainError("su_effective_links: no active secondary user");
  return {h_su_direct * choice.secondary->tx_beam, h_pu_to_su * choice.pu_tx_beam};
}

double sinr_su_mimo(const EffectiveLinks& links, const LinkPowers& p) {
  const std::array<Interferer, 1> pu{Interferer{links.h_int, p.pu}};
  return sinr_su(links.h_eff, pu, p.su, p.noise);
}

}  // namespace oso
