#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "riskscore/distributions.hpp"
#include "riskscore/risk_engine.hpp"

namespace riskscore {

struct ProbConfig {
  double nu = 0.9;
  /// 1 - 0.9^1.83 rounded: puts the probabilistic threshold at the same
  /// exposure as r_min for the default nu.
  double p_min = 0.175;
  std::size_t mc_samples = 1'000'000;
  double grid_step = 0.05;  ///< days
  std::uint64_t seed = 1;

  double ks_bound = 0.05;
  std::size_t grid_size = 1024;
  std::size_t mcmc_samples = 20'000;
  /// Unset means 20% of mcmc_samples.
  std::optional<std::size_t> mcmc_burn_in;
  double mcmc_step = 0.5;  ///< logit scale

  std::size_t burn_in() const { return mcmc_burn_in.value_or(mcmc_samples / 5); }

  bool operator==(const ProbConfig&) const = default;
};

/// Every tunable constant of the engine in one document.
///
/// File format is INI: sections [risk], [epi] and [prob]; `;` or `#`
/// start comments. Each section may carry a free-text `note` key that is
/// kept verbatim for provenance. Any other unrecognised key is an error.
struct EngineConfig {
  RiskParams risk;
  EpiDistributions epi;
  ProbConfig prob;
  std::map<std::string, std::string> notes;  ///< section -> note

  bool operator==(const EngineConfig&) const = default;
};

/// Parses and validates config text. Absent keys keep their defaults.
/// Throws ConfigError listing every problem found.
EngineConfig parse_config(std::string_view text);

EngineConfig load_config(const std::filesystem::path& path);

/// Renders a config that parse_config reads back to an equal value.
std::string render_config(const EngineConfig& config);

}  // namespace riskscore
