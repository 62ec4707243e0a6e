#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "nmpg/problems.hpp"
#include "nmpg/types.hpp"

namespace nmpg::harness {

/// A config document that could not be parsed or validated. `field` is the
/// dotted path of the offending key, empty for syntax errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string reason, const std::string& location = {});
  const std::string& field() const { return field_; }
  /// The message without the field prefix.
  const std::string& reason() const { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

enum class X0Policy { Zeros, DomainWitness, Seeded };

struct X0Spec {
  X0Policy policy = X0Policy::DomainWitness;
  std::uint64_t seed = 0;

  friend bool operator==(const X0Spec&, const X0Spec&) = default;
};

struct ExperimentConfig {
  ProblemSpec problem;
  SolverParams params;
  X0Spec x0;
  bool record_iterates = false;
  std::filesystem::path out_dir = "out";
  std::size_t repeats = 1;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Parses a JSON config document. Missing keys take their defaults; unknown
/// keys, wrong types and invalid solver parameters raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full document with every field present; parse_config() inverts it.
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const SolverParams& params);
nlohmann::json to_json(const ProblemSpec& problem);

/// Starting point for repeat `repeat` (0-based). Seeded starts draw from
/// seed + repeat and are projected onto dom(φ) when necessary.
Vector make_x0(const ExperimentConfig& config, const CompositeProblem& problem,
               std::size_t repeat);

}  // namespace nmpg::harness
