// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "oso/chanlin.hpp"
#include "oso/config.hpp"
#include "oso/mcengine.hpp"
#include "oso/oso_simo.hpp"
#include "oso/report.hpp"
#include "oso/runner.hpp"

using namespace oso;
namespace fs = std::filesystem;

namespace {

constexpr unsigned kWorkers = 4;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool run_criterion(int id, double limit_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && secs > limit_s) v.require(false, fmt("runtime %.1f s over %.0f s limit", secs, limit_s));
  std::printf("CRITERION %d: %s  (%.1f s) %s\n", id, v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
  std::fflush(stdout);
  return v.pass;
}

ExperimentConfig preset_run(std::string_view preset, std::string_view run) {
  for (auto& r : make_preset(preset).runs)
    if (r.name == run) return r.config;
  throw std::runtime_error("no run " + std::string(run));
}

const TrialStats& cell(const ResultTable& t, double gamma, int k) { return t.at(CellKey{gamma, k}); }

double rel_frobenius_error(const CMat& a, const CMat& b) {
  double num = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) num += std::norm(a(r, c) - b(r, c));
  return std::sqrt(num) / frobenius_norm(a);
}

double gram_error(const std::vector<CVec>& vs) {
  double err = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs.size(); ++j)
      err = std::max(err, std::abs(inner(vs[j], vs[i]) - Complex(i == j ? 1.0 : 0.0)));
  return err;
}

Verdict criterion1() {
  Stream s = Stream::keyed({1, 2009});
  int mismatches = 0, admitted = 0;
  for (int inst = 0; inst < 1000; ++inst) {
    const std::size_t k = 1 + static_cast<std::size_t>(uniform01(s) * 10.0);
    const LinkPowers p{1.0, 0.5 + 1.5 * uniform01(s), 1.0};
    const CVec h = sample_rayleigh_vec(4, s);
    std::vector<double> v;
    for (std::size_t i = 0; i < k; ++i) v.push_back(interference_power(h, sample_rayleigh_vec(4, s)));
    const double gamma_db = 6.0 * uniform01(s) - 0.5;
    const double budget = (std::pow(10.0, gamma_db / 10.0) - 1.0) * p.noise / p.su;
    const auto ref = oracle::exhaustive_max_n(v, budget);
    const SelectionDecision d = select_max_n(v, gamma_db, p);
    if (d.n_star != ref.n_star || d.beta != ref.beta) ++mismatches;
    admitted += static_cast<int>(d.n_star);
  }
  Verdict out;
  out.require(mismatches == 0, fmt("%d/1000 mismatches in n_star or beta (%d SUs admitted in total)", mismatches, admitted));
  return out;
}

Verdict criterion2() {
  Stream s = Stream::keyed({2, 2009});
  double recon = 0.0, ortho = 0.0, spectrum = 0.0;
  for (std::size_t n : {2u, 4u}) {
    for (int t = 0; t < 10000; ++t) {
      const CMat m = sample_rayleigh(n, n, s);
      const SvdFactors f = svd_small(m);
      recon = std::max(recon, rel_frobenius_error(m, f.reconstruct()));
      ortho = std::max({ortho, gram_error(f.left_vectors), gram_error(f.right_vectors)});

      std::vector<double> sv(n);
      for (auto& x : sv) x = std::pow(10.0, 4.0 * uniform01(s) - 2.0);
      if (t % 10 == 0) sv.back() = 0.0;
      std::sort(sv.begin(), sv.end(), std::greater<>());
      const auto got = svd_small(sample_conditioned(n, n, sv, s)).singular_values;
      for (std::size_t i = 0; i < n; ++i) spectrum = std::max(spectrum, std::abs(got[i] - sv[i]));
    }
  }
  Verdict out;
  out.require(recon < 1e-10, fmt("max relative reconstruction error %.2e", recon));
  out.require(ortho < 1e-10, fmt("max orthonormality error %.2e", ortho));
  out.require(spectrum < 1e-9, fmt("max spectrum round-trip error %.2e", spectrum));
  return out;
}

Verdict criterion3() {
  ExperimentConfig c;
  c.mode = Mode::simo_n1;
  c.k_list = {1};
  c.lt = c.lr = 1;
  c.gamma_thr_db = {1.0};
  c.seed = 20090318;
  c.bound_samples = 1'000'000;
  const ErgodicBound b = ergodic_upper_bound(c, kWorkers);
  const double dev = std::abs(b.pu.mean - oracle::kC1BoundLr1);
  Verdict out;
  out.require(dev <= 3.0 * b.pu.ci95, fmt("C1_bound %.6f vs oracle %.6f, |diff| %.2e, 3 CI %.2e", b.pu.mean,
                                          oracle::kC1BoundLr1, dev, 3.0 * b.pu.ci95));
  return out;
}

Verdict criterion4() {
  const ExperimentConfig c = preset_run("fig2", "fig2");
  const auto cdfs = beta_cdf(c, kWorkers);
  long violations = 0, points = 0;
  for (std::size_t lo = 0; lo < cdfs.size(); ++lo)
    for (std::size_t hi = lo + 1; hi < cdfs.size(); ++hi)
      for (const auto& d : cdfs)
        for (double t : d.cdf.sorted_samples()) {
          ++points;
          if (cdfs[hi].cdf(t) < cdfs[lo].cdf(t)) ++violations;
        }
  Verdict out;
  out.require(violations == 0, fmt("%ld dominance violations over %ld (pair, sample point) checks", violations, points));

  DoublingSearch ds;
  ds.lr = 4;
  ds.epsilon = 0.01;
  ds.target = 0.99;
  ds.trials = 100'000;
  ds.max_k = 1 << 14;
  ds.seed = c.seed;
  const DoublingResult r = beta_doubling_search(ds, kWorkers);
  std::string steps;
  for (const auto& [k, p] : r.steps) steps += fmt(" %d:%.4f", k, p);
  out.require(r.k_found.has_value(), fmt("P(beta_K <= 0.01) >= 0.99 at K = %d; steps%s", r.k_found.value_or(-1),
                                         steps.c_str()));
  return out;
}

Verdict criterion5() {
  const ExperimentConfig c = preset_run("fig3", "fig3");
  const ResultTable t = run_experiment(c, kWorkers);
  const ErgodicBound b = ergodic_upper_bound(c, kWorkers);
  Verdict out;

  // (a) sum rate non-decreasing in K within CI
  int drops = 0;
  for (double g : c.gamma_thr_db)
    for (std::size_t i = 1; i < c.k_list.size(); ++i) {
      const auto& prev = cell(t, g, c.k_list[i - 1]);
      const auto& next = cell(t, g, c.k_list[i]);
      if (next.mean_sum_rate < prev.mean_sum_rate - combined_ci(prev.ci95_sum, next.ci95_sum)) ++drops;
    }
  out.require(drops == 0, fmt("(a) %d significant sum-rate drops along K", drops));

  // (b) gamma 1 dB, K = 40 within 3 combined CI of the bound
  const auto& k40 = cell(t, 1.0, 40);
  const double ci_b = combined_ci(k40.ci95_sum, b.sum.ci95);
  const double gap_b = b.sum.mean - k40.mean_sum_rate;
  out.require(std::abs(gap_b) <= 3.0 * ci_b, fmt("(b) K=40 sum %.4f vs bound %.4f, gap %.4f, 3 combined CI %.4f",
                                                 k40.mean_sum_rate, b.sum.mean, gap_b, 3.0 * ci_b));

  // (c) gamma 0.1 dB, K = 100 still below the bound by more than the CI
  const auto& k100 = cell(t, 0.1, 100);
  const double ci_c = combined_ci(k100.ci95_sum, b.sum.ci95);
  const double gap_c = b.sum.mean - k100.mean_sum_rate;
  out.require(gap_c > ci_c, fmt("(c) K=100 sum %.4f, bound gap %.4f vs combined CI %.4f", k100.mean_sum_rate, gap_c, ci_c));

  // (d) gamma 0.1 dB PU rate minimum strictly inside the K grid
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < c.k_list.size(); ++i)
    if (cell(t, 0.1, c.k_list[i]).mean_rate_pu < cell(t, 0.1, c.k_list[argmin]).mean_rate_pu) argmin = i;
  out.require(argmin > 0 && argmin + 1 < c.k_list.size(),
              fmt("(d) PU rate at 0.1 dB: K=1 %.4f, min %.4f at K=%d, K=100 %.4f",
                  cell(t, 0.1, c.k_list.front()).mean_rate_pu, cell(t, 0.1, c.k_list[argmin]).mean_rate_pu,
                  c.k_list[argmin], cell(t, 0.1, c.k_list.back()).mean_rate_pu));
  return out;
}

Verdict criterion6() {
  const ExperimentConfig cmax = preset_run("fig4", "fig4_maxn");
  const ExperimentConfig cn1 = preset_run("fig4", "fig4_n1");
  const ResultTable tmax = run_experiment(cmax, kWorkers);
  const ResultTable tn1 = run_experiment(cn1, kWorkers);
  ExperimentConfig bcfg = cn1;
  const ErgodicBound b = ergodic_upper_bound(bcfg, kWorkers);
  Verdict out;

  int below = 0, strict_missing = 0;
  for (const auto& [key, m] : tmax) {
    const auto& n = tn1.at(key);
    const double ci = combined_ci(m.ci95_sum, n.ci95_sum);
    if (m.mean_sum_rate < n.mean_sum_rate - ci) ++below;
    if (key.gamma_thr_db == 1.0 && key.k >= 40 && !(m.mean_sum_rate - n.mean_sum_rate > ci)) ++strict_missing;
  }
  out.require(below == 0, fmt("%d cells with max-N sum rate significantly below N=1", below));
  out.require(strict_missing == 0, fmt("%d cells at 1 dB, K>=40 without strict excess", strict_missing));

  for (double g : cmax.gamma_thr_db) {
    const auto& a = cell(tmax, g, 200);
    const auto& z = cell(tmax, g, 400);
    const double ci = combined_ci(a.ci95_pu, z.ci95_pu);
    const double flat = std::abs(a.mean_rate_pu - z.mean_rate_pu);
    const double ci_gap = combined_ci(z.ci95_pu, b.pu.ci95);
    const double gap = b.pu.mean - z.mean_rate_pu;
    out.require(flat < ci, fmt("PU %.1f dB: |PU(200)-PU(400)| %.4f vs combined CI %.4f", g, flat, ci));
    out.require(gap > ci_gap, fmt("PU %.1f dB: gap to C1 bound %.4f vs CI %.4f", g, gap, ci_gap));
  }
  return out;
}

Verdict criterion7() {
  ExperimentConfig c = preset_run("fig5", "fig5");
  c.k_list = {20};
  c.gamma_thr_db = {1.0};
  const auto r = conditioning_experiment(c, kWorkers);
  const auto& well = r[0].table.begin()->second;
  const auto& ill = r[1].table.begin()->second;
  const double ci = combined_ci(well.ci95_sum, ill.ci95_sum);
  Verdict out;
  out.require(ill.mean_sum_rate - well.mean_sum_rate > ci,
              fmt("profile (%.4f, %.4f) sum %.4f vs (%.4f, %.4f) sum %.4f, combined CI %.4f", r[1].profile[0],
                  r[1].profile[1], ill.mean_sum_rate, r[0].profile[0], r[0].profile[1], well.mean_sum_rate, ci));
  return out;
}

Verdict criterion8() {
  ExperimentConfig mimo = preset_run("mimo-vs-simo", "mimo_2x2");
  ExperimentConfig simo = preset_run("mimo-vs-simo", "simo_1x2");
  mimo.k_list = simo.k_list = {20};
  const ResultTable tm = run_experiment(mimo, kWorkers);
  const ResultTable ts = run_experiment(simo, kWorkers);
  Verdict out;
  for (double g : mimo.gamma_thr_db) {
    const auto& m = cell(tm, g, 20);
    const auto& s = cell(ts, g, 20);
    const double ci = combined_ci(m.ci95_sum, s.ci95_sum);
    out.require(m.mean_sum_rate - s.mean_sum_rate > ci,
                fmt("%.1f dB: MIMO %.4f vs SIMO %.4f, combined CI %.4f", g, m.mean_sum_rate, s.mean_sum_rate, ci));
  }
  return out;
}

Verdict criterion9() {
  const ExperimentConfig c = preset_run("fairness", "fairness");
  const auto rows = run_fairness(c, kWorkers);
  Verdict out;
  for (const auto& r : rows) {
    out.require(r.randomized.distinct_activated() > r.constant.distinct_activated(),
                fmt("K=%d: distinct %zu vs %zu", r.k, r.randomized.distinct_activated(), r.constant.distinct_activated()));
    out.require(r.randomized.jain_index() > r.constant.jain_index(),
                fmt("Jain %.4f vs %.4f", r.randomized.jain_index(), r.constant.jain_index()));
  }
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion10() {
  const fs::path root = fs::temp_directory_path() / ("oso_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  Verdict out;
  int files = 0, differing = 0;
  for (auto name : preset_names()) {
    std::vector<fs::path> first;
    for (unsigned workers : {1u, 3u}) {
      RunRequest req;
      const Preset p = make_preset(name);
      req.label = p.name;
      req.runs = p.runs;
      req.out_dir = root / (std::string(name) + "_w" + std::to_string(workers));
      req.workers = workers;
      req.plot_script = false;
      const RunOutcome o = execute(req);
      if (first.empty()) {
        first = o.csvs;
        continue;
      }
      for (std::size_t i = 0; i < o.csvs.size(); ++i) {
        ++files;
        if (i >= first.size() || slurp(first[i]) != slurp(o.csvs[i])) ++differing;
      }
    }
  }
  fs::remove_all(root);
  out.require(files > 0 && differing == 0, fmt("%d of %d preset CSVs differ between 1 and 3 workers", differing, files));
  return out;
}

}  // namespace

int main() {
  bool all = true;
  all &= run_criterion(1, 10, criterion1);
  all &= run_criterion(2, 10, criterion2);
  all &= run_criterion(3, 30, criterion3);
  all &= run_criterion(4, 120, criterion4);
  all &= run_criterion(5, 300, criterion5);
  all &= run_criterion(6, 300, criterion6);
  all &= run_criterion(7, 120, criterion7);
  all &= run_criterion(8, 120, criterion8);
  all &= run_criterion(9, 30, criterion9);
  all &= run_criterion(10, 0, criterion10);
  return all ? 0 : 1;
}
