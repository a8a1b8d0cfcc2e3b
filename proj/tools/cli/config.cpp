#include "cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

namespace lqsd::cli {

namespace {

const std::set<std::string>& known_task_keys() {
  static const std::set<std::string> keys = {
      "task",    "out",      "seed",     "threads",  "q",        "r",
      "lambda",  "method",   "h",        "x_max",    "q_min",    "q_max",
      "q_points", "n_paths", "dt",       "horizon",  "bridge_correction",
      "x_list",  "q_list",   "t_list",   "lambda_fractions", "t_obs", "x0"};
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double require_param(const ModelSection& s, const std::string& key) {
  const auto it = s.params.find(key);
  if (it == s.params.end()) {
    throw ParseError("model '" + s.family + "' requires parameter '" + key + "'");
  }
  return parse_decimal(it->second);
}

void reject_unknown(const ModelSection& s, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : s.params) {
    if (!allowed.count(key)) {
      throw ParseError("unknown parameter '" + key + "' for model '" + s.family + "'");
    }
  }
}

}  // namespace

std::string to_string(Task t) {
  switch (t) {
    case Task::kDescribe: return "describe";
    case Task::kSpectral: return "spectral";
    case Task::kScale: return "scale";
    case Task::kQsd: return "qsd";
    case Task::kVerifyAnalytic: return "verify-analytic";
    case Task::kVerifyMc: return "verify-mc";
  }
  return "unknown";
}

Task parse_task(std::string_view name) {
  for (Task t : {Task::kDescribe, Task::kSpectral, Task::kScale, Task::kQsd,
                 Task::kVerifyAnalytic, Task::kVerifyMc}) {
    if (name == to_string(t)) return t;
  }
  throw ParseError("unknown task '" + std::string(name) + "'");
}

double parse_decimal(std::string_view text) {
  static const std::regex pattern(R"([+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)");
  const std::string s(trim(text));
  if (!std::regex_match(s, pattern)) {
    throw ParseError("not a decimal number: '" + s + "'");
  }
  double value = 0.0;
  const char* begin = s.data() + (s.front() == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ParseError("not a finite decimal number: '" + s + "'");
  }
  return value;
}

std::vector<double> parse_decimal_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) out.push_back(parse_decimal(item));
  return out;
}

double RunConfig::number(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw ParseError("task '" + to_string(task) + "' requires '" + key + "'");
  }
  return parse_decimal(it->second);
}

double RunConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::vector<double> RunConfig::list_or(const std::string& key,
                                       std::vector<double> fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_decimal_list(it->second);
}

std::uint64_t RunConfig::seed_or(std::uint64_t fallback) const {
  const auto it = params.find("seed");
  if (it == params.end()) return fallback;
  const std::string s(trim(it->second));
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("seed must be an unsigned 64-bit integer: '" + s + "'");
  }
  return v;
}

std::string RunConfig::string_or(const std::string& key, std::string fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  bool in_model = false;
  bool saw_model = false;
  bool saw_task = false;
  std::set<std::string> seen_top;
  std::set<std::string> seen_model;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line != "[model]") throw ParseError(where + "unknown section " + std::string(line));
      if (saw_model) throw ParseError(where + "exactly one [model] section is allowed");
      in_model = saw_model = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ParseError(where + "empty key or value");
    if (in_model) {
      if (!seen_model.insert(key).second) throw ParseError(where + "duplicate key " + key);
      if (key == "family") {
        cfg.model_section.family = value;
      } else {
        cfg.model_section.params[key] = value;
      }
      continue;
    }
    if (!seen_top.insert(key).second) throw ParseError(where + "duplicate key " + key);
    if (!known_task_keys().count(key)) throw ParseError(where + "unknown key " + key);
    if (key == "task") {
      cfg.task = parse_task(value);
      saw_task = true;
    } else if (key == "out") {
      cfg.out_prefix = value;
    } else {
      cfg.params[key] = value;
    }
  }
  if (!saw_model) throw ParseError("missing [model] section");
  if (cfg.model_section.family.empty()) throw ParseError("[model] needs a family");
  if (!saw_task) throw ParseError("missing task");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

LevyModel build_model(const ModelSection& section) {
  if (section.family == "bm_drift") {
    reject_unknown(section, {"mu", "sigma"});
    return LevyModel::bm_drift(require_param(section, "mu"), require_param(section, "sigma"));
  }
  if (section.family == "cp_exp_drift") {
    reject_unknown(section, {"mu", "c", "rho"});
    return LevyModel::cp_exp_drift(require_param(section, "mu"), require_param(section, "c"),
                                   require_param(section, "rho"));
  }
  if (section.family == "meromorphic") {
    reject_unknown(section, {"a", "sigma", "atoms"});
    const auto it = section.params.find("atoms");
    if (it == section.params.end()) throw ParseError("meromorphic model requires 'atoms'");
    std::vector<MeromorphicAtom> atoms;
    for (auto item : split(it->second, ',')) {
      const auto parts = split(item, ':');
      if (parts.size() != 2) throw ParseError("atom must be written a:rho, got '" +
                                              std::string(item) + "'");
      atoms.push_back({parse_decimal(parts[0]), parse_decimal(parts[1])});
    }
    return LevyModel::meromorphic(require_param(section, "a"), require_param(section, "sigma"),
                                  std::move(atoms));
  }
  throw ParseError("unknown model family '" + section.family + "'");
}

}  // namespace lqsd::cli
