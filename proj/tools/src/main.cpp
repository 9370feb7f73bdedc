#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace rc = riskscore::cli;

namespace {

int report(const rc::CommandOutcome& outcome) {
  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : outcome.errors) std::cerr << "error: " << e << '\n';
  if (!outcome.summary.empty()) (outcome.exit_code == 0 ? std::cout : std::cerr) << outcome.summary << '\n';
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-tracing risk scoring and notification engine"};
  app.require_subcommand(1);
  std::optional<std::filesystem::path> config_path;
  app.add_option("--config", config_path, "INI config file (default: $RISKSCORE_CONFIG, then built-ins)");

  rc::ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score recipients from events and reports");
  score_cmd->add_option("--events", score.events, "events.jsonl")->required();
  score_cmd->add_option("--reports", score.reports, "reports.jsonl")->required();
  score_cmd->add_option("--out", score.out, "per-recipient CSV")->required();
  score_cmd->add_option("--sources-out", score.sources_out, "per-source breakdown JSONL");
  score_cmd->add_option("--store", score.store, "store directory to ingest the reports into");

  rc::DecascadeArgs decascade;
  auto* decascade_cmd = app.add_subcommand("decascade", "Apply a source's negative test to a store");
  decascade_cmd->add_option("--store", decascade.store, "store directory")->required();
  decascade_cmd->add_option("--source", decascade.source, "source id")->required();
  decascade_cmd->add_option("--test-time", decascade.test_time, "test time, minutes since epoch")->required();
  decascade_cmd->add_option("--out", decascade.out, "outcomes JSONL")->required();

  rc::ValidateArgs validate;
  auto* validate_cmd =
      app.add_subcommand("validate-infectiousness", "Compare generation - incubation with the Gaussian factor");
  validate_cmd->add_option("--out", validate.out, "histogram CSV")->required();
  validate_cmd->add_option("--report-out", validate.report_out, "fit report JSON");
  validate_cmd->add_option("-n,--samples", validate.n, "sample count (default: prob.mc_samples)");
  validate_cmd->add_option("--seed", validate.seed, "seed (default: prob.seed)");

  rc::DecayArgs decay;
  auto* decay_cmd = app.add_subcommand("decay-curve", "Infection probability given no symptoms, over time");
  decay_cmd->add_option("--out", decay.out, "CSV")->required();
  decay_cmd->add_option("--probs", decay.infection_probs, "initial infection probabilities")
      ->required()
      ->delimiter(',');

  rc::SurfaceArgs surface;
  auto* surface_cmd = app.add_subcommand("risk-surface", "Risk score over distance, time and duration");
  surface_cmd->add_option("--out", surface.out, "long-format CSV")->required();
  surface_cmd->add_option("--distance", surface.distance, "metres: start:stop:step or a value");
  surface_cmd->add_option("--time-from-onset", surface.time_from_onset, "days: start:stop:step or a value");
  surface_cmd->add_option("--duration", surface.duration, "minutes: start:stop:step or a value");

  rc::FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-nu", "Posterior over nu from outcome data");
  fit_cmd->add_option("--outcomes", fit.outcomes, "CSV with rho_total,infected")->required();
  fit_cmd->add_option("--method", fit.method, "grid or mcmc")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, rc::FitMethod>{{"grid", rc::FitMethod::Grid}, {"mcmc", rc::FitMethod::Mcmc}}));
  fit_cmd->add_option("--out", fit.out, "posterior CSV")->required();
  fit_cmd->add_option("--diagnostics-out", fit.diagnostics_out, "diagnostics JSON");
  fit_cmd->add_option("--seed", fit.seed, "MCMC seed (default: prob.seed)");

  rc::SimulateArgs simulate;
  auto* simulate_cmd = app.add_subcommand("simulate-outcomes", "Synthetic outcome data");
  simulate_cmd->add_option("--out", simulate.out, "CSV")->required();
  simulate_cmd->add_option("-m,--records", simulate.m, "record count")->required();
  simulate_cmd->add_option("--rho-range", simulate.rho_range, "low:high")->required();
  simulate_cmd->add_option("--nu", simulate.nu, "true nu (default: prob.nu)");
  simulate_cmd->add_option("--seed", simulate.seed, "seed (default: prob.seed)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : rc::kConfigError;
  }

  return report(rc::guarded([&]() -> rc::CommandOutcome {
    const riskscore::EngineConfig config = rc::resolve_config(config_path);
    if (score_cmd->parsed()) return rc::cmd_score(config, score);
    if (decascade_cmd->parsed()) return rc::cmd_decascade(config, decascade);
    if (validate_cmd->parsed()) return rc::cmd_validate_infectiousness(config, validate);
    if (decay_cmd->parsed()) return rc::cmd_decay_curve(config, decay);
    if (surface_cmd->parsed()) return rc::cmd_risk_surface(config, surface);
    if (fit_cmd->parsed()) return rc::cmd_fit_nu(config, fit);
    return rc::cmd_simulate_outcomes(config, simulate);
  }));
}
