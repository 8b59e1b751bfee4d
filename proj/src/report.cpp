#include "oso/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oso/error.hpp"

namespace oso {

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

constexpr double kCdfGridLowDb = -60.0;
constexpr double kCdfGridHighDb = 10.0;
constexpr double kCdfGridStepDb = 0.5;

}  // namespace

std::string format_csv(const ResultTable& table) {
  if (table.empty()) throw DomainError("format_csv: empty result table");
  std::string out(kRateCsvHeader);
  out += '\n';
  for (const auto& [key, s] : table) {
    out += std::to_string(key.k) + ',' + g6(key.gamma_thr_db) + ',' + g6(s.mean_rate_pu) + ',' +
           g6(s.mean_rate_su_total) + ',' + g6(s.mean_sum_rate) + ',' + g6(s.ci95_sum) + ',' +
           g6(s.activation_rate) + '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) {
  write_text(path, format_csv(table));
}

ResultTable parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRateCsvHeader) throw IoError("parse_csv: unexpected header");
  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 7) throw IoError("parse_csv: expected 7 columns in '" + line + "'");
    try {
      TrialStats s;
      s.mean_rate_pu = std::stod(cells[2]);
      s.mean_rate_su_total = std::stod(cells[3]);
      s.mean_sum_rate = std::stod(cells[4]);
      s.ci95_sum = std::stod(cells[5]);
      s.activation_rate = std::stod(cells[6]);
      table[CellKey{std::stod(cells[1]), std::stoi(cells[0])}] = s;
    } catch (const std::logic_error&) {
      throw IoError("parse_csv: malformed row '" + line + "'");
    }
  }
  return table;
}

std::string format_beta_cdf_csv(std::span<const BetaDistribution> cdfs) {
  std::string out = "beta_db";
  for (const auto& c : cdfs) out += ",cdf_K" + std::to_string(c.k);
  out += '\n';
  const int steps = static_cast<int>(std::lround((kCdfGridHighDb - kCdfGridLowDb) / kCdfGridStepDb));
  for (int i = 0; i <= steps; ++i) {
    const double db = kCdfGridLowDb + i * kCdfGridStepDb;
    const double beta = std::pow(10.0, db / 10.0);
    out += g6(db);
    for (const auto& c : cdfs) out += ',' + g6(c.cdf(beta));
    out += '\n';
  }
  return out;
}

std::string format_bound_csv(const ErgodicBound& b) {
  return "C1_bound,C1_ci95,C2_bound,C2_ci95,sum_bound,sum_ci95\n" + g6(b.pu.mean) + ',' + g6(b.pu.ci95) +
         ',' + g6(b.su.mean) + ',' + g6(b.su.ci95) + ',' + g6(b.sum.mean) + ',' + g6(b.sum.ci95) + '\n';
}

std::string format_fairness_csv(std::span<const FairnessComparison> rows) {
  std::string out = "K,gamma_thr_db,arm,slots,activations,distinct_activated,jain_index,counts\n";
  auto row = [&](const FairnessComparison& r, std::string_view arm, const FairnessState& s) {
    std::string counts;
    for (auto c : s.activation_counts()) counts += (counts.empty() ? "" : ";") + std::to_string(c);
    out += std::to_string(r.k) + ',' + g6(r.gamma_thr_db) + ',' + std::string(arm) + ',' +
           std::to_string(r.slots) + ',' + std::to_string(s.total_activations()) + ',' +
           std::to_string(s.distinct_activated()) + ',' + g6(s.jain_index()) + ',' + counts + '\n';
  };
  for (const auto& r : rows) {
    row(r, "randomized", r.randomized);
    row(r, "constant", r.constant);
  }
  return out;
}

std::string format_manifest(const RunManifest& m) {
  std::string out;
  out += "name=" + m.name + '\n';
  out += "version=" + m.version + '\n';
  out += "seed=" + std::to_string(m.config.seed) + '\n';
  out += "workers=" + std::to_string(m.workers) + '\n';
  out += "started=" + m.started + '\n';
  out += "finished=" + m.finished + '\n';
  for (std::size_t i = 0; i < m.outputs.size(); ++i)
    out += "output." + std::to_string(i) + '=' + m.outputs[i].filename().string() + '\n';
  for (std::size_t i = 0; i < m.warnings.size(); ++i)
    out += "warning." + std::to_string(i) + '=' + m.warnings[i] + '\n';
  std::istringstream echo(serialize_config(m.config));
  std::string line;
  while (std::getline(echo, line)) out += "config." + line + '\n';
  return out;
}

void write_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_text(path, format_manifest(m));
}

ExperimentConfig read_manifest_config(const std::filesystem::path& path) {
  const ConfigEntries all = read_config_file(path);
  ConfigEntries cfg;
  constexpr std::string_view prefix = "config.";
  for (const auto& [key, e] : all)
    if (key.starts_with(prefix)) cfg[key.substr(prefix.size())] = e;
  return build_config(cfg);
}

std::vector<std::string> emit_plotscript(std::span<const std::filesystem::path> csv_paths,
                                         std::string_view preset, const std::filesystem::path& out) {
  std::vector<std::string> warnings;
  std::string s = "#!/usr/bin/env python3\n# Plot script for preset '" + std::string(preset) +
                  "'. Generated; edit freely.\n";
  if (csv_paths.empty()) {
    write_text(out, s);
    return warnings;
  }

  s += R"PY(import csv
import os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def rows(name):
    with open(os.path.join(HERE, name), newline="") as f:
        return list(csv.DictReader(f))


def plot_rates(name, bound=None):
    data = rows(name)
    fig, ax = plt.subplots()
    for g in sorted({float(r["gamma_thr_db"]) for r in data}):
        sel = [r for r in data if float(r["gamma_thr_db"]) == g]
        k = [int(r["K"]) for r in sel]
        ax.plot(k, [float(r["mean_sum_rate"]) for r in sel], marker="o", label=f"sum, {g:g} dB")
        ax.plot(k, [float(r["mean_rate_pu"]) for r in sel], linestyle="--", label=f"PU, {g:g} dB")
    if bound is not None:
        b = rows(bound)[0]
        ax.axhline(float(b["sum_bound"]), color="k", linestyle=":", label="upper bound")
        ax.axhline(float(b["C1_bound"]), color="gray", linestyle=":", label="PU no interference")
    ax.set_xlabel("number of candidate SUs K")
    ax.set_ylabel("throughput [bits/channel use]")
    ax.grid(True)
    ax.legend()
    fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=150)


def plot_cdf(name):
    data = rows(name)
    fig, ax = plt.subplots()
    x = [float(r["beta_db"]) for r in data]
    for col in data[0]:
        if col.startswith("cdf_K"):
            ax.plot(x, [float(r[col]) for r in data], label="K = " + col[5:])
    ax.set_xlabel("interference power beta [dB]")
    ax.set_ylabel("CDF")
    ax.grid(True)
    ax.legend()
    fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=150)


def plot_fairness(name):
    data = rows(name)
    fig, ax = plt.subplots()
    for r in data:
        counts = [int(c) for c in r["counts"].split(";")]
        ax.bar([i + (0.2 if r["arm"] == "constant" else -0.2) for i in range(1, len(counts) + 1)],
               counts, width=0.4, label=f"{r['arm']} (Jain {float(r['jain_index']):.3f})")
    ax.set_xlabel("candidate SU")
    ax.set_ylabel("activations")
    ax.legend()
    fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=150)


)PY";

  auto present = [&](const std::filesystem::path& p) {
    if (std::filesystem::exists(p)) return true;
    warnings.push_back("plot script: missing CSV " + p.string());
    return false;
  };
  auto has_suffix = [](const std::string& n, std::string_view suffix) { return n.ends_with(suffix); };

  for (const auto& p : csv_paths) {
    if (!present(p)) continue;
    const std::string name = p.filename().string();
    if (has_suffix(name, "_bound.csv")) continue;
    if (has_suffix(name, "_cdf.csv")) {
      s += "plot_cdf(\"" + name + "\")\n";
    } else if (has_suffix(name, "_fairness.csv")) {
      s += "plot_fairness(\"" + name + "\")\n";
    } else {
      const std::string stem = name.substr(0, name.size() - 4);
      std::string bound = "None";
      for (const auto& q : csv_paths)
        if (q.filename().string() == stem + "_bound.csv" && std::filesystem::exists(q))
          bound = "\"" + stem + "_bound.csv\"";
      s += "plot_rates(\"" + name + "\", " + bound + ")\n";
    }
  }
  write_text(out, s);
  return warnings;
}

}  // namespace oso
