#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lqsd/levy_model.hpp"

namespace lqsd::cli {

/// Malformed config text or command line (exit status 2).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Task { kDescribe, kSpectral, kScale, kQsd, kVerifyAnalytic, kVerifyMc };

std::string to_string(Task t);
Task parse_task(std::string_view name);

/// Strict decimal literal: optional sign, digits with optional fraction,
/// optional exponent. No inf/nan/hex, no trailing characters.
double parse_decimal(std::string_view text);

/// Comma-separated list of decimals.
std::vector<double> parse_decimal_list(std::string_view text);

/// Model section as written: family plus raw parameter strings.
struct ModelSection {
  std::string family;
  std::map<std::string, std::string> params;
};

/// Parsed run configuration:
///
///   # comment
///   task = qsd
///   lambda = 0.25
///   [model]
///   family = bm_drift
///   mu = 1
///   sigma = 1
///
/// Top-level keys hold task parameters; the single [model] section holds the
/// family and its parameters. Meromorphic atoms are written `atoms = a:rho, ...`.
struct RunConfig {
  ModelSection model_section;
  Task task = Task::kDescribe;
  std::map<std::string, std::string> params;
  std::string out_prefix = "lqsd";

  [[nodiscard]] bool has(const std::string& key) const { return params.count(key) > 0; }
  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] double number_or(const std::string& key, double fallback) const;
  [[nodiscard]] std::vector<double> list_or(const std::string& key,
                                            std::vector<double> fallback) const;
  [[nodiscard]] std::uint64_t seed_or(std::uint64_t fallback) const;
  [[nodiscard]] std::string string_or(const std::string& key, std::string fallback) const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Builds the model; throws lqsd::ModelError on invariant violations and
/// ParseError on missing or unknown parameters.
LevyModel build_model(const ModelSection& section);

}  // namespace lqsd::cli
