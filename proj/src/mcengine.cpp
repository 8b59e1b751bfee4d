#include "oso/mcengine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <unordered_map>

#include "oso/error.hpp"
#include "oso/random.hpp"

namespace oso {

namespace {

constexpr std::uint64_t kBlockSize = 1024;

// Stream domains keep independent experiments on unrelated streams.
enum Domain : std::uint64_t {
  kTrialDomain = 1,
  kBoundDomain = 2,
  kFairnessNetworkDomain = 3,
  kScheduleDomain = 4,
  kDoublingDomain = 5,
};

constexpr std::size_t kPrimary = 0;
constexpr std::size_t candidate_user(std::size_t idx) { return idx + 1; }

// Runs fn(begin, end) over fixed trial blocks and returns partials in block order.
template <typename Fn>
auto run_blocks(std::uint64_t trials, unsigned workers, Fn&& fn) {
  using Partial = decltype(fn(std::uint64_t{}, std::uint64_t{}));
  const std::uint64_t blocks = (trials + kBlockSize - 1) / kBlockSize;
  std::vector<std::optional<Partial>> partials(blocks);

  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        const std::uint64_t begin = b * kBlockSize;
        partials[b].emplace(fn(begin, std::min(trials, begin + kBlockSize)));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(blocks)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<Partial> out;
  out.reserve(blocks);
  for (auto& p : partials) out.push_back(std::move(*p));
  return out;
}

// How a single link matrix is drawn.
struct LinkSampler {
  std::size_t rows = 1;
  std::size_t cols = 1;
  std::vector<double> spectrum;  // empty: i.i.d. Rayleigh

  CMat draw(Stream& s) const {
    return spectrum.empty() ? sample_rayleigh(rows, cols, s)
                            : sample_conditioned(rows, cols, spectrum, s);
  }
};

// Links of one trial. H_{rx,tx} is a pure function of (seed, domain, trial, rx, tx).
class TrialLinks {
 public:
  TrialLinks(std::uint64_t seed, std::uint64_t domain, std::uint64_t trial, const LinkSampler& sampler)
      : seed_(seed), domain_(domain), trial_(trial), sampler_(sampler) {}

  CMat draw(std::size_t rx, std::size_t tx) const {
    Stream s = Stream::keyed({seed_, domain_, trial_, rx, tx});
    return sampler_.draw(s);
  }

  const CMat& cached(std::size_t rx, std::size_t tx) {
    const std::uint64_t key = (static_cast<std::uint64_t>(rx) << 32) | tx;
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, draw(rx, tx)).first;
    return it->second;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t domain_;
  std::uint64_t trial_;
  const LinkSampler& sampler_;
  std::unordered_map<std::uint64_t, CMat> cache_;
};

struct CellAccumulator {
  MeanAccumulator pu;
  MeanAccumulator su;
  MeanAccumulator sum;
  std::uint64_t active_trials = 0;
  std::uint64_t active_sus = 0;

  void add(double pu_rate, double su_rate, std::size_t n_active) {
    pu.add(pu_rate);
    su.add(su_rate);
    sum.add(pu_rate + su_rate);
    if (n_active > 0) ++active_trials;
    active_sus += n_active;
  }

  void merge(const CellAccumulator& o) {
    pu.merge(o.pu);
    su.merge(o.su);
    sum.merge(o.sum);
    active_trials += o.active_trials;
    active_sus += o.active_sus;
  }

  TrialStats stats() const {
    const auto n = static_cast<double>(sum.count());
    TrialStats t;
    t.mean_rate_pu = pu.mean();
    t.mean_rate_su_total = su.mean();
    t.mean_sum_rate = sum.mean();
    t.ci95_pu = pu.ci95();
    t.ci95_su = su.ci95();
    t.ci95_sum = sum.ci95();
    t.activation_rate = static_cast<double>(active_trials) / n;
    t.mean_active_sus = static_cast<double>(active_sus) / n;
    t.trials = sum.count();
    return t;
  }
};

// Cells indexed gamma-major: cell(g, k) = g * nk + k.
using CellGrid = std::vector<CellAccumulator>;

ResultTable to_table(const ExperimentConfig& cfg, const std::vector<CellGrid>& partials) {
  const std::size_t nk = cfg.k_list.size();
  CellGrid total(nk * cfg.gamma_thr_db.size());
  for (const auto& p : partials)
    for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(p[i]);

  ResultTable table;
  for (std::size_t g = 0; g < cfg.gamma_thr_db.size(); ++g)
    for (std::size_t k = 0; k < nk; ++k)
      table[CellKey{cfg.gamma_thr_db[g], cfg.k_list[k]}] = total[g * nk + k].stats();
  return table;
}

std::size_t max_k(const ExperimentConfig& cfg) {
  return static_cast<std::size_t>(*std::max_element(cfg.k_list.begin(), cfg.k_list.end()));
}

void simo_trial(const ExperimentConfig& cfg, const LinkSampler& sampler, const LinkPowers& powers,
                std::uint64_t trial, CellGrid& cells) {
  TrialLinks links(cfg.seed, kTrialDomain, trial, sampler);
  const CVec direct = links.draw(kPrimary, kPrimary).column(0);
  const std::size_t pool = max_k(cfg);
  std::vector<double> interference(pool);
  for (std::size_t i = 0; i < pool; ++i)
    interference[i] = interference_power(direct, links.draw(kPrimary, candidate_user(i)).column(0));

  const bool max_n = cfg.mode == Mode::simo_maxn;
  const std::size_t nk = cfg.k_list.size();
  std::vector<Interferer> interferers;
  for (std::size_t g = 0; g < cfg.gamma_thr_db.size(); ++g) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const std::span<const double> prefix(interference.data(), static_cast<std::size_t>(cfg.k_list[ki]));
      const SelectionDecision d = max_n ? select_max_n(prefix, cfg.gamma_thr_db[g], powers)
                                        : select_single_su(prefix, cfg.gamma_thr_db[g], powers);
      const double pu_rate = rate(sinr_pu(direct, d.beta, powers));

      double su_total = 0.0;
      for (std::size_t a : d.active_indices) {
        const std::size_t user = candidate_user(a);
        interferers.clear();
        interferers.push_back({links.cached(user, kPrimary).column(0), powers.pu});
        for (std::size_t b : d.active_indices)
          if (b != a) interferers.push_back({links.cached(user, candidate_user(b)).column(0), powers.su});
        su_total += rate(sinr_su(links.cached(user, user).column(0), interferers, powers.su, powers.noise));
      }
      cells[g * nk + ki].add(pu_rate, su_total, d.n_star);
    }
  }
}

void mimo_trial(const ExperimentConfig& cfg, const LinkSampler& sampler, const LinkPowers& powers,
                std::uint64_t trial, CellGrid& cells) {
  TrialLinks links(cfg.seed, kTrialDomain, trial, sampler);
  const PuBeam pu = pu_beam(links.draw(kPrimary, kPrimary));
  const std::size_t pool = max_k(cfg);
  std::vector<CandidateEigen> candidates;
  candidates.reserve(pool);
  for (std::size_t i = 0; i < pool; ++i)
    candidates.push_back(analyse_candidate(links.draw(kPrimary, candidate_user(i)), pu.rx_direction));

  const std::size_t nk = cfg.k_list.size();
  for (std::size_t g = 0; g < cfg.gamma_thr_db.size(); ++g) {
    for (std::size_t ki = 0; ki < nk; ++ki) {
      const std::span<const CandidateEigen> prefix(candidates.data(),
                                                   static_cast<std::size_t>(cfg.k_list[ki]));
      const BeamChoice choice =
          select_su_two_stage(pu, prefix, cfg.gamma_thr_db[g], powers, cfg.rank_tol);
      const double pu_rate = rate(sinr_pu_mimo(choice.pu_gain, choice.leak_power(), powers));
      double su_rate = 0.0;
      if (choice.secondary) {
        const std::size_t user = candidate_user(choice.secondary->index);
        const EffectiveLinks eff =
            su_effective_links(links.cached(user, user), links.cached(user, kPrimary), choice);
        su_rate = rate(sinr_su_mimo(eff, powers));
      }
      cells[g * nk + ki].add(pu_rate, su_rate, choice.secondary ? 1 : 0);
    }
  }
}

template <typename TrialFn>
ResultTable sweep(const ExperimentConfig& cfg, unsigned workers, TrialFn&& trial_fn) {
  const std::size_t cells = cfg.k_list.size() * cfg.gamma_thr_db.size();
  auto partials = run_blocks(cfg.trials, resolve_workers(workers), [&](std::uint64_t b, std::uint64_t e) {
    CellGrid grid(cells);
    for (std::uint64_t t = b; t < e; ++t) trial_fn(t, grid);
    return grid;
  });
  return to_table(cfg, partials);
}

[[noreturn]] void config_error(const std::string& msg) { throw ConfigError(msg); }

}  // namespace

std::string_view to_string(Mode m) noexcept {
  switch (m) {
    case Mode::simo_n1: return "simo_n1";
    case Mode::simo_maxn: return "simo_maxn";
    case Mode::mimo_n1: return "mimo_n1";
    case Mode::fairness: return "fairness";
    case Mode::conditioning: return "conditioning";
    case Mode::beta_cdf: return "beta_cdf";
  }
  return "unknown";
}

Mode parse_mode(std::string_view name) {
  for (Mode m : {Mode::simo_n1, Mode::simo_maxn, Mode::mimo_n1, Mode::fairness, Mode::conditioning,
                 Mode::beta_cdf})
    if (to_string(m) == name) return m;
  config_error("unknown mode '" + std::string(name) + "'");
}

LinkPowers ExperimentConfig::link_powers() const {
  return LinkPowers{std::pow(10.0, p1_over_n0_db / 10.0), std::pow(10.0, p2_over_n0_db / 10.0), 1.0};
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials < 1) config_error("trials must be >= 1");
  if (cfg.k_list.empty()) config_error("K list must not be empty");
  for (int k : cfg.k_list)
    if (k < 0) config_error("K values must be >= 0");
  if (cfg.gamma_thr_db.empty() && cfg.mode != Mode::beta_cdf)
    config_error("gamma_thr_db list must not be empty");
  for (double g : cfg.gamma_thr_db)
    if (std::isnan(g)) config_error("gamma_thr_db values must be numbers");
  if (!std::isfinite(cfg.p1_over_n0_db) || !std::isfinite(cfg.p2_over_n0_db))
    config_error("power-to-noise ratios must be finite dB values");
  if (cfg.lt < 1 || cfg.lr < 1 || cfg.lt > static_cast<int>(kMaxSvdDim) ||
      cfg.lr > static_cast<int>(kMaxSvdDim))
    config_error("antenna counts must lie in [1, 8]");
  if (!(cfg.rank_tol >= 0.0)) config_error("rank_tol must be >= 0");
  if (cfg.bound_samples < 2) config_error("bound_samples must be >= 2");

  const std::string mode(to_string(cfg.mode));
  switch (cfg.mode) {
    case Mode::simo_n1:
    case Mode::simo_maxn:
      if (cfg.lt != 1) config_error(mode + " requires Lt = 1");
      break;
    case Mode::beta_cdf:
      if (cfg.lt != 1) config_error(mode + " requires Lt = 1");
      for (int k : cfg.k_list)
        if (k < 1) config_error("beta_cdf requires K >= 1");
      break;
    case Mode::mimo_n1:
      if (cfg.lt < 2 || cfg.lr < 2) config_error(mode + " requires Lt >= 2 and Lr >= 2");
      break;
    case Mode::fairness:
      if (cfg.lt != 2) config_error("fairness requires Lt = 2");
      break;
    case Mode::conditioning: {
      if (cfg.lt < 2 || cfg.lr < 2) config_error(mode + " requires Lt >= 2 and Lr >= 2");
      if (cfg.profiles.empty()) config_error("conditioning requires at least one profile");
      const auto need = static_cast<std::size_t>(std::min(cfg.lt, cfg.lr));
      for (const auto& p : cfg.profiles) {
        if (p.size() != need)
          config_error("each profile needs " + std::to_string(need) + " singular values");
        for (double s : p)
          if (!(s >= 0.0) || !std::isfinite(s)) config_error("profile singular values must be >= 0");
        if (!std::is_sorted(p.begin(), p.end(), std::greater<>()))
          config_error("profile singular values must be descending");
      }
      break;
    }
  }
}

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultTable run_experiment(const ExperimentConfig& cfg, unsigned workers) {
  validate(cfg);
  const LinkPowers powers = cfg.link_powers();
  switch (cfg.mode) {
    case Mode::simo_n1:
    case Mode::simo_maxn: {
      const LinkSampler sampler{static_cast<std::size_t>(cfg.lr), 1, {}};
      return sweep(cfg, workers, [&](std::uint64_t t, CellGrid& g) { simo_trial(cfg, sampler, powers, t, g); });
    }
    case Mode::mimo_n1: {
      const LinkSampler sampler{static_cast<std::size_t>(cfg.lr), static_cast<std::size_t>(cfg.lt), {}};
      return sweep(cfg, workers, [&](std::uint64_t t, CellGrid& g) { mimo_trial(cfg, sampler, powers, t, g); });
    }
    default:
      config_error("run_experiment does not handle mode " + std::string(to_string(cfg.mode)));
  }
}

std::vector<ProfileResult> conditioning_experiment(const ExperimentConfig& cfg, unsigned workers) {
  validate(cfg);
  if (cfg.mode != Mode::conditioning) config_error("conditioning_experiment requires conditioning mode");
  const LinkPowers powers = cfg.link_powers();
  std::vector<ProfileResult> out;
  for (const auto& profile : cfg.profiles) {
    const LinkSampler sampler{static_cast<std::size_t>(cfg.lr), static_cast<std::size_t>(cfg.lt), profile};
    out.push_back({profile, sweep(cfg, workers, [&](std::uint64_t t, CellGrid& g) {
                     mimo_trial(cfg, sampler, powers, t, g);
                   })});
  }
  return out;
}

std::vector<BetaDistribution> beta_cdf(const ExperimentConfig& cfg, unsigned workers) {
  validate(cfg);
  if (cfg.mode != Mode::beta_cdf) config_error("beta_cdf requires beta_cdf mode");

  std::vector<int> ks = cfg.k_list;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<std::vector<double>> samples(ks.size(), std::vector<double>(cfg.trials));
  const LinkSampler sampler{static_cast<std::size_t>(cfg.lr), 1, {}};

  run_blocks(cfg.trials, resolve_workers(workers), [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t t = b; t < e; ++t) {
      TrialLinks links(cfg.seed, kTrialDomain, t, sampler);
      const CVec direct = links.draw(kPrimary, kPrimary).column(0);
      double running = std::numeric_limits<double>::infinity();
      std::size_t next = 0;
      for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        for (; next < static_cast<std::size_t>(ks[ki]); ++next)
          running = std::min(running,
                             interference_power(direct, links.draw(kPrimary, candidate_user(next)).column(0)));
        samples[ki][t] = running;
      }
    }
    return 0;
  });

  std::vector<BetaDistribution> out;
  out.reserve(ks.size());
  for (std::size_t ki = 0; ki < ks.size(); ++ki) out.push_back({ks[ki], EmpiricalCdf(std::move(samples[ki]))});
  return out;
}

ErgodicBound ergodic_upper_bound(const ExperimentConfig& cfg, unsigned workers) {
  validate(cfg);
  if (cfg.mode != Mode::simo_n1 && cfg.mode != Mode::simo_maxn)
    config_error("ergodic_upper_bound requires a SIMO mode");
  const LinkPowers powers = cfg.link_powers();
  const LinkSampler sampler{static_cast<std::size_t>(cfg.lr), 1, {}};

  struct Acc {
    MeanAccumulator pu, su, sum;
  };
  auto partials = run_blocks(cfg.bound_samples, resolve_workers(workers), [&](std::uint64_t b, std::uint64_t e) {
    Acc acc;
    for (std::uint64_t t = b; t < e; ++t) {
      TrialLinks links(cfg.seed, kBoundDomain, t, sampler);
      const CVec h11 = links.draw(0, 0).column(0);
      const CVec h22 = links.draw(1, 1).column(0);
      const Interferer pu_interference{links.draw(1, 0).column(0), powers.pu};
      const double c1 = rate(norm_sq(h11) * powers.pu / powers.noise);
      const double c2 = rate(sinr_su(h22, std::span(&pu_interference, 1), powers.su, powers.noise));
      acc.pu.add(c1);
      acc.su.add(c2);
      acc.sum.add(c1 + c2);
    }
    return acc;
  });
  Acc total;
  for (const auto& p : partials) {
    total.pu.merge(p.pu);
    total.su.merge(p.su);
    total.sum.merge(p.sum);
  }
  return {total.pu.estimate(), total.su.estimate(), total.sum.estimate()};
}

std::vector<FairnessComparison> run_fairness(const ExperimentConfig& cfg, unsigned workers) {
  validate(cfg);
  if (cfg.mode != Mode::fairness) config_error("run_fairness requires fairness mode");
  const LinkPowers powers = cfg.link_powers();
  const auto lr = static_cast<std::size_t>(cfg.lr);

  const LinkSampler direct_sampler{lr, 2, {}};
  const LinkSampler cross_sampler{lr, 1, {}};
  const std::size_t pool = max_k(cfg);
  FairnessNetwork full{TrialLinks(cfg.seed, kFairnessNetworkDomain, 0, direct_sampler).draw(kPrimary, kPrimary),
                       {},
                       powers};
  const TrialLinks cross(cfg.seed, kFairnessNetworkDomain, 0, cross_sampler);
  for (std::size_t i = 0; i < pool; ++i) full.cross_to_pu.push_back(cross.draw(kPrimary, candidate_user(i)).column(0));

  std::vector<BeamWeights> schedule(cfg.trials);
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    Stream s = Stream::keyed({cfg.seed, kScheduleDomain, t});
    schedule[t].alpha = uniform01(s);
    schedule[t].theta = 2.0 * std::numbers::pi * uniform01(s);
  }
  const std::vector<BeamWeights> fixed(cfg.trials, BeamWeights{1.0, 0.0});

  std::vector<FairnessComparison> out;
  for (double gamma : cfg.gamma_thr_db) {
    for (int k : cfg.k_list) {
      FairnessNetwork net{full.direct,
                          {full.cross_to_pu.begin(), full.cross_to_pu.begin() + k},
                          powers};
      auto replay = [&](const std::vector<BeamWeights>& slots) {
        auto parts = run_blocks(cfg.trials, resolve_workers(workers), [&](std::uint64_t b, std::uint64_t e) {
          return fairness_experiment(net, std::span(slots).subspan(b, e - b), gamma);
        });
        FairnessState merged(static_cast<std::size_t>(k));
        for (const auto& p : parts) merged.merge(p);
        return merged;
      };
      out.push_back({k, gamma, cfg.trials, replay(schedule), replay(fixed)});
    }
  }
  return out;
}

DoublingResult beta_doubling_search(const DoublingSearch& s, unsigned workers) {
  if (s.lr < 1 || s.trials < 1 || s.max_k < 1 || !(s.epsilon > 0.0))
    throw ConfigError("beta_doubling_search: invalid parameters");
  const LinkSampler sampler{static_cast<std::size_t>(s.lr), 1, {}};
  std::vector<double> running(s.trials, std::numeric_limits<double>::infinity());

  DoublingResult result;
  std::size_t drawn = 0;
  for (int k = 1; k <= s.max_k; k *= 2) {
    const auto target_k = static_cast<std::size_t>(k);
    auto counts = run_blocks(s.trials, resolve_workers(workers), [&](std::uint64_t b, std::uint64_t e) {
      std::uint64_t hits = 0;
      for (std::uint64_t t = b; t < e; ++t) {
        const TrialLinks links(s.seed, kDoublingDomain, t, sampler);
        const CVec direct = links.draw(kPrimary, kPrimary).column(0);
        for (std::size_t i = drawn; i < target_k; ++i)
          running[t] = std::min(running[t],
                                interference_power(direct, links.draw(kPrimary, candidate_user(i)).column(0)));
        if (running[t] <= s.epsilon) ++hits;
      }
      return hits;
    });
    drawn = target_k;
    std::uint64_t hits = 0;
    for (auto c : counts) hits += c;
    const double p = static_cast<double>(hits) / static_cast<double>(s.trials);
    result.steps.emplace_back(k, p);
    if (p >= s.target) {
      result.k_found = k;
      break;
    }
  }
  return result;
}

}  // namespace oso
