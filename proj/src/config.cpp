#include "oso/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "oso/error.hpp"

namespace oso {

namespace {

constexpr std::string_view kRequired[] = {"mode",          "K",             "Lt",     "Lr",  "gamma_thr_db",
                                          "P1_over_N0_db", "P2_over_N0_db", "trials", "seed"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(const std::string& key, const ConfigEntry& e, std::string_view what) {
  throw ConfigError(e.context + ": " + key + ": " + std::string(what) + " '" + e.value + "'");
}

template <typename T>
T parse_number(std::string_view text, const std::string& key, const ConfigEntry& e) {
  text = trim(text);
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars has no sign handling for "+inf"; accept it explicitly.
    if (text == "inf" || text == "+inf") return std::numeric_limits<T>::infinity();
    if (text == "-inf") return -std::numeric_limits<T>::infinity();
  }
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    bad_value(key, e, "unparseable value");
  return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const ConfigEntry& e) {
  std::vector<T> out;
  for (auto item : split(e.value, ',')) out.push_back(parse_number<T>(item, key, e));
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, char sep, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys = {
      "mode",          "K",      "Lt",   "Lr",       "gamma_thr_db",  "P1_over_N0_db",
      "P2_over_N0_db", "trials", "seed", "profiles", "bound_samples", "rank_tol"};
  return keys;
}

ConfigEntries read_config_entries(std::istream& in, std::string_view source) {
  ConfigEntries out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string context = std::string(source) + ":" + std::to_string(lineno);
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError(context + ": expected key=value");
    const std::string key(trim(text.substr(0, eq)));
    if (key.empty()) throw ConfigError(context + ": empty key");
    if (out.contains(key)) throw ConfigError(context + ": duplicate key '" + key + "'");
    out.emplace(key, ConfigEntry{std::string(trim(text.substr(eq + 1))), context});
  }
  return out;
}

ConfigEntries read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return read_config_entries(in, path.string());
}

void apply_overrides(ConfigEntries& base, const ConfigEntries& overrides) {
  for (const auto& [k, v] : overrides) base[k] = v;
}

ExperimentConfig build_config(const ConfigEntries& entries) {
  const auto& keys = config_keys();
  for (const auto& [key, e] : entries)
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw ConfigError(e.context + ": unknown key '" + key + "'");

  std::string missing;
  for (auto key : kRequired)
    if (!entries.contains(key)) missing += (missing.empty() ? "" : ", ") + std::string(key);
  if (!missing.empty()) throw ConfigError("missing required fields: " + missing);

  auto entry = [&](std::string_view k) -> std::pair<std::string, const ConfigEntry&> {
    return {std::string(k), entries.find(k)->second};
  };

  ExperimentConfig cfg;
  {
    auto [k, e] = entry("mode");
    try {
      cfg.mode = parse_mode(trim(e.value));
    } catch (const ConfigError&) {
      bad_value(k, e, "unknown mode");
    }
  }
  {
    auto [k, e] = entry("K");
    cfg.k_list = parse_list<int>(k, e);
  }
  {
    auto [k, e] = entry("Lt");
    cfg.lt = parse_number<int>(e.value, k, e);
  }
  {
    auto [k, e] = entry("Lr");
    cfg.lr = parse_number<int>(e.value, k, e);
  }
  {
    auto [k, e] = entry("gamma_thr_db");
    cfg.gamma_thr_db = parse_list<double>(k, e);
  }
  {
    auto [k, e] = entry("P1_over_N0_db");
    cfg.p1_over_n0_db = parse_number<double>(e.value, k, e);
  }
  {
    auto [k, e] = entry("P2_over_N0_db");
    cfg.p2_over_n0_db = parse_number<double>(e.value, k, e);
  }
  {
    auto [k, e] = entry("trials");
    cfg.trials = parse_number<std::uint64_t>(e.value, k, e);
  }
  {
    auto [k, e] = entry("seed");
    cfg.seed = parse_number<std::uint64_t>(e.value, k, e);
  }
  if (entries.contains("profiles")) {
    auto [k, e] = entry("profiles");
    for (auto item : split(e.value, ',')) {
      std::vector<double> profile;
      for (auto v : split(item, ':')) profile.push_back(parse_number<double>(v, k, e));
      cfg.profiles.push_back(std::move(profile));
    }
  }
  if (entries.contains("bound_samples")) {
    auto [k, e] = entry("bound_samples");
    cfg.bound_samples = parse_number<std::uint64_t>(e.value, k, e);
  }
  if (entries.contains("rank_tol")) {
    auto [k, e] = entry("rank_tol");
    cfg.rank_tol = parse_number<double>(e.value, k, e);
  }

  try {
    validate(cfg);
  } catch (const ConfigError& err) {
    // Point at the sources that assembled this config.
    throw ConfigError(std::string(err.what()) + " (from " + entries.begin()->second.context + ")");
  }
  return cfg;
}

ExperimentConfig parse_config(const std::optional<std::filesystem::path>& file,
                              const ConfigEntries& flags) {
  ConfigEntries entries = file ? read_config_file(*file) : ConfigEntries{};
  apply_overrides(entries, flags);
  return build_config(entries);
}

ConfigEntries to_entries(const ExperimentConfig& cfg, std::string_view context) {
  const std::string ctx(context);
  ConfigEntries e;
  auto put = [&](std::string_view key, std::string value) { e[std::string(key)] = {std::move(value), ctx}; };
  put("mode", std::string(to_string(cfg.mode)));
  put("K", join(cfg.k_list, ',', [](int k) { return std::to_string(k); }));
  put("Lt", std::to_string(cfg.lt));
  put("Lr", std::to_string(cfg.lr));
  put("gamma_thr_db", join(cfg.gamma_thr_db, ',', format_double));
  put("P1_over_N0_db", format_double(cfg.p1_over_n0_db));
  put("P2_over_N0_db", format_double(cfg.p2_over_n0_db));
  put("trials", std::to_string(cfg.trials));
  put("seed", std::to_string(cfg.seed));
  if (!cfg.profiles.empty())
    put("profiles", join(cfg.profiles, ',', [](const std::vector<double>& p) { return join(p, ':', format_double); }));
  put("bound_samples", std::to_string(cfg.bound_samples));
  put("rank_tol", format_double(cfg.rank_tol));
  return e;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const ConfigEntries e = to_entries(cfg, "echo");
  std::string out;
  for (auto key : config_keys()) {
    const auto it = e.find(key);
    if (it != e.end()) out += std::string(key) + "=" + it->second.value + "\n";
  }
  return out;
}

const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names = {"fig2", "fig3", "fig4", "fig5", "mimo-vs-simo", "fairness"};
  return names;
}

Preset make_preset(std::string_view name) {
  ExperimentConfig base;
  base.p1_over_n0_db = 0.0;
  base.p2_over_n0_db = 0.0;
  base.trials = 100'000;
  base.seed = 20090318;

  if (name == "fig2") {
    ExperimentConfig c = base;
    c.mode = Mode::beta_cdf;
    c.lt = 1;
    c.lr = 4;
    c.k_list = {1, 2, 4, 8, 16};
    return {"fig2", {{"fig2", c}}};
  }
  if (name == "fig3") {
    ExperimentConfig c = base;
    c.mode = Mode::simo_n1;
    c.lt = 1;
    c.lr = 4;
    c.k_list = {1, 2, 4, 6, 8, 10, 15, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    c.gamma_thr_db = {0.1, 0.5, 1.0};
    return {"fig3", {{"fig3", c}}};
  }
  if (name == "fig4") {
    ExperimentConfig c = base;
    c.mode = Mode::simo_maxn;
    c.lt = 1;
    c.lr = 4;
    c.k_list = {1, 2, 5, 10, 20, 40, 60, 80, 100, 150, 200, 300, 400};
    c.gamma_thr_db = {0.1, 0.5, 1.0};
    ExperimentConfig n1 = c;
    n1.mode = Mode::simo_n1;
    return {"fig4", {{"fig4_maxn", c}, {"fig4_n1", n1}}};
  }
  if (name == "fig5") {
    ExperimentConfig c = base;
    c.mode = Mode::conditioning;
    c.lt = 2;
    c.lr = 2;
    c.k_list = {1, 2, 5, 10, 20, 40};
    c.gamma_thr_db = {1.0};
    c.profiles = {{1.0, 1.0}, {std::sqrt(1.98), std::sqrt(0.02)}};
    return {"fig5", {{"fig5", c}}};
  }
  if (name == "mimo-vs-simo") {
    ExperimentConfig mimo = base;
    mimo.mode = Mode::mimo_n1;
    mimo.lt = 2;
    mimo.lr = 2;
    mimo.k_list = {1, 2, 5, 10, 20, 30, 40, 50};
    mimo.gamma_thr_db = {0.1, 1.0};
    ExperimentConfig simo = mimo;
    simo.mode = Mode::simo_n1;
    simo.lt = 1;
    return {"mimo-vs-simo", {{"mimo_2x2", mimo}, {"simo_1x2", simo}}};
  }
  if (name == "fairness") {
    ExperimentConfig c = base;
    c.mode = Mode::fairness;
    c.lt = 2;
    c.lr = 2;
    c.k_list = {10};
    c.gamma_thr_db = {1.0};
    c.trials = 10'000;
    return {"fairness", {{"fairness", c}}};
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

}  // namespace oso
