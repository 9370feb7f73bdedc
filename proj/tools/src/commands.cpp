#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riskscore/distributions.hpp"
#include "riskscore/errors.hpp"
#include "riskscore/inference.hpp"
#include "riskscore/notifier.hpp"
#include "riskscore/prob_model.hpp"
#include "riskscore/store_io.hpp"

namespace riskscore::cli {

namespace {

using json = nlohmann::json;

constexpr std::size_t kRecommendedSamples = 10'000;
constexpr std::size_t kMaxSurfaceRows = 10'000'000;
constexpr std::size_t kMaxHistogramBins = 10'000;

fs::path companion(const fs::path& out, std::string_view suffix) {
  return out.parent_path() / (out.stem().string() + std::string(suffix));
}

void write_artifact(CommandOutcome& outcome, const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_file_atomic(path, contents);
  outcome.artifacts.push_back(path);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  return in;
}

CommandOutcome failure(int code, std::vector<std::string> errors, std::string summary) {
  CommandOutcome out;
  out.exit_code = code;
  out.errors = std::move(errors);
  out.summary = std::move(summary);
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, s.find_last_not_of(" \t\r") - first + 1));
}

void prefix_all(std::vector<std::string>& into, const std::vector<std::string>& errors,
                const fs::path& file) {
  for (const std::string& e : errors) into.push_back(file.filename().string() + " " + e);
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<double> parse_axis(const std::string& spec) {
  std::vector<std::string_view> parts;
  std::string_view rest = spec;
  for (auto colon = rest.find(':'); colon != std::string_view::npos; colon = rest.find(':')) {
    parts.push_back(rest.substr(0, colon));
    rest.remove_prefix(colon + 1);
  }
  parts.push_back(rest);

  std::vector<double> values;
  for (std::string_view p : parts) {
    const auto v = parse_real(trim(p));
    if (!v || !std::isfinite(*v)) throw ParameterError("grid spec '" + spec + "': '" + std::string(p) + "' is not a number");
    values.push_back(*v);
  }
  if (values.size() == 1) return values;
  if (values.size() != 3) throw ParameterError("grid spec '" + spec + "': expected start:stop:step or a single value");

  const double start = values[0];
  const double stop = values[1];
  const double step = values[2];
  if (!(step > 0.0)) throw ParameterError("grid spec '" + spec + "': step must be > 0");
  if (stop < start) throw ParameterError("grid spec '" + spec + "': stop is below start");
  const double count = std::floor((stop - start) / step + 1e-9) + 1.0;
  if (count > static_cast<double>(kMaxSurfaceRows)) throw ParameterError("grid spec '" + spec + "': too many points");
  std::vector<double> axis;
  for (std::size_t k = 0; k < static_cast<std::size_t>(count); ++k) axis.push_back(start + static_cast<double>(k) * step);
  return axis;
}

CommandOutcome guarded(const std::function<CommandOutcome()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    return failure(kConfigError, e.problems(), "invalid configuration");
  } catch (const ParameterError& e) {
    return failure(kConfigError, {e.what()}, "invalid parameter");
  } catch (const ModelValidityError& e) {
    return failure(kModelError, {e.what()}, "model validity check failed");
  } catch (const ValidationError& e) {
    return failure(kDataError, e.problems(), "invalid input data");
  } catch (const std::exception& e) {
    return failure(kDataError, {e.what()}, "data error");
  }
}

EngineConfig resolve_config(const std::optional<fs::path>& path) {
  if (path) return load_config(*path);
  if (const char* env = std::getenv("RISKSCORE_CONFIG"); env && *env) return load_config(env);
  return EngineConfig{};
}

CommandOutcome cmd_score(const EngineConfig& config, const ScoreArgs& args) {
  std::vector<std::string> errors;
  std::ifstream events_in = open_input(args.events);
  std::ifstream reports_in = open_input(args.reports);
  const auto events = read_events_jsonl(events_in);
  const auto headers = read_reports_jsonl(reports_in);
  prefix_all(errors, events.errors, args.events);
  prefix_all(errors, headers.errors, args.reports);
  const auto reports = assemble_reports(headers.items, events.items);
  errors.insert(errors.end(), reports.errors.begin(), reports.errors.end());
  if (!errors.empty()) return failure(kDataError, std::move(errors), "input rejected; nothing written");

  std::map<RecipientId, RecipientLedger> ledgers;
  for (const SourceReport& report : reports.items) {
    for (const RecipientId& recipient : recipients_of(report)) {
      auto it = ledgers.try_emplace(recipient, RecipientLedger(recipient)).first;
      SourceContribution c = source_contribution(report, recipient, config.risk);
      if (!c.event_risks.empty()) it->second.set(report.source_id, std::move(c));
    }
  }

  CommandOutcome outcome;
  if (args.store) {
    EventStore store = load_store(*args.store, config.risk);
    for (const SourceReport& report : reports.items) store.ingest_report(report, config.risk);
    save_store(store, *args.store);
    outcome.artifacts.push_back(*args.store / kJournalFile);
  }

  std::string csv = "recipient_id,total_risk,notify\n";
  std::string sources;
  std::size_t notified = 0;
  for (const auto& [recipient, ledger] : ledgers) {
    const bool notify = should_notify(ledger, config.risk);
    notified += notify ? 1 : 0;
    csv += recipient + "," + format_real(ledger.total()) + "," + (notify ? "true" : "false") + "\n";
    for (const auto& [source, contribution] : ledger.per_source()) {
      json events_json = json::array();
      for (const EventRisk& e : contribution.event_risks) {
        events_json.push_back({{"event_index", e.event_index}, {"start_time_min", e.start_time}, {"risk", e.risk}});
      }
      sources += json{{"recipient_id", recipient},
                      {"source_id", source},
                      {"risk", contribution.risk},
                      {"events", std::move(events_json)}}
                     .dump();
      sources += '\n';
    }
  }
  write_artifact(outcome, args.out, csv);
  write_artifact(outcome, args.sources_out.value_or(companion(args.out, ".sources.jsonl")), sources);
  outcome.summary = std::to_string(ledgers.size()) + " recipients scored from " +
                    std::to_string(reports.items.size()) + " reports; " + std::to_string(notified) +
                    " notified";
  return outcome;
}

CommandOutcome cmd_decascade(const EngineConfig& config, const DecascadeArgs& args) {
  if (!fs::is_directory(args.store)) throw DataError("store '" + args.store.string() + "' does not exist");
  EventStore store = load_store(args.store, config.risk);
  std::vector<DecascadeRecord> records = store.apply_negative_test({args.source, args.test_time}, config.risk);
  if (records.size() == 1 && records.front().outcome == Outcome::UnknownSource) {
    return failure(kDataError, {"unknown source '" + args.source + "'"}, "nothing to de-cascade");
  }
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.recipient_id < b.recipient_id; });

  std::map<Outcome, std::size_t> counts;
  std::string text;
  for (const DecascadeRecord& r : records) {
    ++counts[r.outcome];
    text += to_json_line(r);
    text += '\n';
  }
  CommandOutcome outcome;
  write_artifact(outcome, args.out, text);
  save_store(store, args.store);
  outcome.artifacts.push_back(args.store / kJournalFile);
  outcome.summary = std::to_string(counts[Outcome::Released]) + " released, " +
                    std::to_string(counts[Outcome::StillNotified]) + " still notified, " +
                    std::to_string(counts[Outcome::Unaffected]) + " unaffected";
  return outcome;
}

CommandOutcome cmd_validate_infectiousness(const EngineConfig& config, const ValidateArgs& args) {
  const std::size_t n = args.n.value_or(config.prob.mc_samples);
  const std::uint64_t seed = args.seed.value_or(config.prob.seed);
  CommandOutcome outcome;
  if (n < kRecommendedSamples) {
    outcome.warnings.push_back("sample size " + std::to_string(n) + " is below the recommended " +
                               std::to_string(kRecommendedSamples));
  }

  std::vector<double> xs = sample_difference(config.epi, n, seed);
  const FitReport fit = gaussian_fit_report(xs, config.risk.mu0, config.risk.sigma0);

  // Freedman-Diaconis bin width.
  std::sort(xs.begin(), xs.end());
  const auto quantile = [&](double q) { return xs[static_cast<std::size_t>(q * static_cast<double>(n - 1))]; };
  const double lo = xs.front();
  const double hi = xs.back();
  const double iqr = quantile(0.75) - quantile(0.25);
  std::size_t bins = 1;
  if (iqr > 0.0 && hi > lo) {
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 1, kMaxHistogramBins);
  }
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  std::vector<std::size_t> counts(bins, 0);
  for (double x : xs) {
    const auto b = static_cast<std::size_t>((x - lo) / width);
    ++counts[std::min(b, bins - 1)];
  }

  std::string csv = "bin_left,bin_right,empirical_density,gaussian_density\n";
  for (std::size_t b = 0; b < bins; ++b) {
    const double left = lo + static_cast<double>(b) * width;
    const double right = b + 1 == bins ? (hi > lo ? hi : lo + width) : left + width;
    const double empirical = static_cast<double>(counts[b]) / (static_cast<double>(n) * (right - left));
    const double gaussian = (normal_cdf(right, config.risk.mu0, config.risk.sigma0) -
                             normal_cdf(left, config.risk.mu0, config.risk.sigma0)) /
                            (right - left);
    csv += format_real(left) + "," + format_real(right) + "," + format_real(empirical) + "," +
           format_real(gaussian) + "\n";
  }

  const json report = {{"ks_statistic", fit.ks_statistic},
                       {"mean", fit.sample_mean},
                       {"sd", fit.sample_sd},
                       {"skewness", fit.sample_skewness},
                       {"left_tail_heavier", fit.left_tail_heavier()},
                       {"n", n},
                       {"seed", seed},
                       {"gaussian_mean", config.risk.mu0},
                       {"gaussian_sd", config.risk.sigma0},
                       {"ks_bound", config.prob.ks_bound}};
  write_artifact(outcome, args.out, csv);
  write_artifact(outcome, args.report_out.value_or(companion(args.out, ".fit.json")), report.dump(2) + "\n");

  std::ostringstream summary;
  summary << "ks=" << format_real(fit.ks_statistic) << " mean=" << format_real(fit.sample_mean)
          << " sd=" << format_real(fit.sample_sd) << " skewness=" << format_real(fit.sample_skewness);
  outcome.summary = summary.str();
  if (fit.ks_statistic >= config.prob.ks_bound) {
    outcome.exit_code = kModelError;
    outcome.errors.push_back("ks_statistic " + format_real(fit.ks_statistic) + " >= bound " +
                             format_real(config.prob.ks_bound));
  }
  return outcome;
}

CommandOutcome cmd_decay_curve(const EngineConfig& config, const DecayArgs& args) {
  if (args.infection_probs.empty()) throw ParameterError("at least one initial infection probability is required");
  std::set<double> probs;
  for (double p : args.infection_probs) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterError("infection probability " + format_real(p) + " outside (0, 1)");
    probs.insert(p);
  }

  const ProbParams params{config.prob.nu, config.prob.p_min,
                          build_sum_cdf(config.epi, config.prob.mc_samples, config.prob.grid_step, config.prob.seed)};
  params.validate();
  const SumCdf& g = params.sum_cdf;

  std::string csv = "time_from_event_days,infection_prob_initial,conditional_probability\n";
  for (double p : probs) {
    const RecipientExposure exposure{"", {{0.0, std::log1p(-p) / std::log(params.nu)}}};
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = g.grid_time(k);
      const double value = symptom_free_infection_probability(exposure, t * kMinutesPerDay, params);
      csv += format_real(t) + "," + format_real(p) + "," + format_real(value) + "\n";
    }
  }
  CommandOutcome outcome;
  write_artifact(outcome, args.out, csv);
  outcome.summary = std::to_string(probs.size()) + " curves over " + std::to_string(g.size()) +
                    " grid points to " + format_real(g.horizon()) + " days";
  return outcome;
}

CommandOutcome cmd_risk_surface(const EngineConfig& config, const SurfaceArgs& args) {
  const RiskParams& risk = config.risk;
  const std::vector<double> distances = args.distance ? parse_axis(*args.distance) : std::vector{risk.d_min};
  const std::vector<double> times = args.time_from_onset ? parse_axis(*args.time_from_onset) : std::vector{risk.mu0};
  const std::vector<double> durations = args.duration ? parse_axis(*args.duration) : std::vector{1.0};
  for (double d : distances) {
    if (!(d > 0.0)) throw ParameterError("distance " + format_real(d) + " must be > 0");
  }
  for (double m : durations) {
    if (!(m > 0.0)) throw ParameterError("duration " + format_real(m) + " must be > 0");
  }
  const double rows = static_cast<double>(distances.size()) * static_cast<double>(times.size()) *
                      static_cast<double>(durations.size());
  if (rows > static_cast<double>(kMaxSurfaceRows)) throw ParameterError("risk surface has too many points");

  std::string csv = "distance,time_from_onset_days,duration_min,risk_score\n";
  for (double d : distances) {
    const double df = distance_factor(d, risk);
    for (double t : times) {
      const double inf = infectiousness_factor_days(t, risk);
      for (double m : durations) {
        csv += format_real(d) + "," + format_real(t) + "," + format_real(m) + "," + format_real(df * inf * m) + "\n";
      }
    }
  }
  CommandOutcome outcome;
  write_artifact(outcome, args.out, csv);
  outcome.summary = format_real(rows) + " surface points";
  return outcome;
}

namespace {

struct OutcomeTable {
  OutcomeDataset data;
  std::vector<std::size_t> lines;  // file line of each record
  std::vector<std::string> errors;
};

OutcomeTable read_outcomes_csv(const fs::path& path) {
  std::ifstream in = open_input(path);
  OutcomeTable table;
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (!header_seen) {
      header_seen = true;
      std::string header;
      for (char c : text) {
        if (c != ' ') header += c;
      }
      if (header != "rho_total,infected") {
        table.errors.push_back("line " + std::to_string(number) + ": expected header 'rho_total,infected'");
        return table;
      }
      continue;
    }
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
      table.errors.push_back("line " + std::to_string(number) + ": expected two columns");
      continue;
    }
    const auto rho = parse_real(trim(std::string_view(text).substr(0, comma)));
    const std::string flag = trim(std::string_view(text).substr(comma + 1));
    if (!rho || !std::isfinite(*rho) || *rho < 0.0) {
      table.errors.push_back("line " + std::to_string(number) + ": rho_total must be a finite number >= 0");
    } else if (flag != "0" && flag != "1") {
      table.errors.push_back("line " + std::to_string(number) + ": infected must be 0 or 1");
    } else {
      table.data.records.push_back({*rho, flag == "1"});
      table.lines.push_back(number);
    }
  }
  return table;
}

json optional_number(double v, bool present) { return present ? json(v) : json(nullptr); }

}  // namespace

CommandOutcome cmd_fit_nu(const EngineConfig& config, const FitArgs& args) {
  OutcomeTable table = read_outcomes_csv(args.outcomes);
  if (!table.errors.empty()) {
    std::vector<std::string> errors;
    prefix_all(errors, table.errors, args.outcomes);
    return failure(kDataError, std::move(errors), "outcomes rejected; nothing written");
  }
  try {
    validate(table.data);
  } catch (const ImpossibleRecordError& e) {
    return failure(kDataError,
                   {"line " + std::to_string(table.lines[e.row()]) + " (row " + std::to_string(e.row() + 1) +
                    "): infected with rho_total = 0 has zero likelihood under the model"},
                   "outcomes rejected; nothing written");
  }

  const bool mcmc = args.method == FitMethod::Mcmc;
  const Posterior post = mcmc ? posterior_mcmc(table.data, config.prob.mcmc_samples, config.prob.burn_in(),
                                               config.prob.mcmc_step, args.seed.value_or(config.prob.seed))
                              : posterior_grid(table.data, config.prob.grid_size);
  const double mean = post.mean();
  const double sd = post.sd();
  const auto [lo, hi] = post.credible_interval(0.9);

  CommandOutcome outcome;
  std::string csv = "nu,density\n";
  for (std::size_t k = 0; k < post.grid_nu.size(); ++k) {
    csv += format_real(post.grid_nu[k]) + "," + format_real(post.grid_density[k]) + "\n";
  }
  write_artifact(outcome, args.out, csv);
  if (post.samples) {
    std::string samples = "nu\n";
    for (double v : *post.samples) samples += format_real(v) + "\n";
    write_artifact(outcome, companion(args.out, ".samples.csv"), samples);
  }
  const json diagnostics = {
      {"method", mcmc ? "mcmc" : "grid"},
      {"n_records", table.data.records.size()},
      {"mean", mean},
      {"sd", sd},
      {"ci90", {lo, hi}},
      {"acceptance_rate", optional_number(post.diagnostics.acceptance_rate, mcmc)},
      {"ess", optional_number(post.diagnostics.ess, mcmc)},
      {"warning", post.diagnostics.warning.empty() ? json(nullptr) : json(post.diagnostics.warning)}};
  write_artifact(outcome, args.diagnostics_out.value_or(companion(args.out, ".diagnostics.json")),
                 diagnostics.dump(2) + "\n");
  if (!post.diagnostics.warning.empty()) outcome.warnings.push_back(post.diagnostics.warning);

  outcome.summary = "posterior mean=" + format_real(mean) + " sd=" + format_real(sd) + " 90% CI=[" +
                    format_real(lo) + ", " + format_real(hi) + "]";
  return outcome;
}

CommandOutcome cmd_simulate_outcomes(const EngineConfig& config, const SimulateArgs& args) {
  const auto colon = args.rho_range.find(':');
  if (colon == std::string::npos || args.rho_range.find(':', colon + 1) != std::string::npos) {
    throw ParameterError("rho range '" + args.rho_range + "': expected low:high");
  }
  const auto low = parse_real(trim(std::string_view(args.rho_range).substr(0, colon)));
  const auto high = parse_real(trim(std::string_view(args.rho_range).substr(colon + 1)));
  if (!low || !high) throw ParameterError("rho range '" + args.rho_range + "': expected two numbers");

  const OutcomeDataset data = simulate_outcomes(args.nu.value_or(config.prob.nu), args.m, {*low, *high},
                                                args.seed.value_or(config.prob.seed));
  std::string csv = "rho_total,infected\n";
  std::size_t infected = 0;
  for (const OutcomeRecord& r : data.records) {
    infected += r.infected ? 1 : 0;
    csv += format_real(r.rho_total) + (r.infected ? ",1\n" : ",0\n");
  }
  CommandOutcome outcome;
  write_artifact(outcome, args.out, csv);
  outcome.summary = std::to_string(data.records.size()) + " records, " + std::to_string(infected) + " infected";
  return outcome;
}

}  // namespace riskscore::cli
