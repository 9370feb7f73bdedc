#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "riskscore/config.hpp"
#include "riskscore/risk_engine.hpp"

namespace riskscore::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kDataError = 1, kConfigError = 2, kModelError = 3 };

/// Result of one subcommand. `errors` is empty exactly when exit_code is 0.
struct CommandOutcome {
  int exit_code = kOk;
  std::string summary;
  std::vector<fs::path> artifacts;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

struct ScoreArgs {
  fs::path events;
  fs::path reports;
  fs::path out;
  std::optional<fs::path> sources_out;  ///< default: <out stem>.sources.jsonl
  std::optional<fs::path> store;        ///< also ingest the reports here
};

struct DecascadeArgs {
  fs::path store;
  SourceId source;
  Minutes test_time = 0;
  fs::path out;
};

struct ValidateArgs {
  fs::path out;
  std::optional<fs::path> report_out;  ///< default: <out stem>.fit.json
  std::optional<std::size_t> n;        ///< default: prob.mc_samples
  std::optional<std::uint64_t> seed;   ///< default: prob.seed
};

struct DecayArgs {
  fs::path out;
  std::vector<double> infection_probs;
};

/// Each axis is "start:stop:step" or a single value; unset axes sit at
/// their maximal point (d_min, mu0, 1 minute).
struct SurfaceArgs {
  fs::path out;
  std::optional<std::string> distance;
  std::optional<std::string> time_from_onset;
  std::optional<std::string> duration;
};

enum class FitMethod { Grid, Mcmc };

struct FitArgs {
  fs::path outcomes;
  FitMethod method = FitMethod::Grid;
  fs::path out;
  std::optional<fs::path> diagnostics_out;  ///< default: <out stem>.diagnostics.json
  std::optional<std::uint64_t> seed;
};

struct SimulateArgs {
  fs::path out;
  std::size_t m = 0;
  std::string rho_range;  ///< "low:high"
  std::optional<double> nu;
  std::optional<std::uint64_t> seed;
};

CommandOutcome cmd_score(const EngineConfig& config, const ScoreArgs& args);
CommandOutcome cmd_decascade(const EngineConfig& config, const DecascadeArgs& args);
CommandOutcome cmd_validate_infectiousness(const EngineConfig& config, const ValidateArgs& args);
CommandOutcome cmd_decay_curve(const EngineConfig& config, const DecayArgs& args);
CommandOutcome cmd_risk_surface(const EngineConfig& config, const SurfaceArgs& args);
CommandOutcome cmd_fit_nu(const EngineConfig& config, const FitArgs& args);
CommandOutcome cmd_simulate_outcomes(const EngineConfig& config, const SimulateArgs& args);

/// Parses "start:stop:step" (inclusive of stop) or a single value.
/// Throws ParameterError for a malformed spec, step <= 0 or stop < start.
std::vector<double> parse_axis(const std::string& spec);

/// Runs `body`, mapping library exceptions onto exit codes.
CommandOutcome guarded(const std::function<CommandOutcome()>& body);

/// Config from `path`, else $RISKSCORE_CONFIG, else defaults.
EngineConfig resolve_config(const std::optional<fs::path>& path);

/// Shortest text that reads back to the same double.
std::string format_real(double v);

}  // namespace riskscore::cli
