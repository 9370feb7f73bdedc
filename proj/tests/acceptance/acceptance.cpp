// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "report_gen.hpp"
#include "riskscore/distributions.hpp"
#include "riskscore/inference.hpp"
#include "riskscore/notifier.hpp"
#include "riskscore/prob_model.hpp"
#include "riskscore/risk_engine.hpp"
#include "riskscore/store_io.hpp"
#include "symptom_oracle.hpp"

namespace {

using namespace riskscore;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

constexpr Minutes kOnset = 18'400 * kMinutesPerDay + kNoonOffset;

SourceReport single_event_report(double days_from_onset, double minutes, double metres) {
  const Minutes start = kOnset + static_cast<Minutes>(std::llround(days_from_onset * kMinutesPerDay));
  ContactEvent e{"src", "rcp", start, minutes, metres, {}, 1.0};
  return {"src", kOnset, std::max(start, kOnset) + kMinutesPerDay, {e}, 1.0};
}

Verdict ac1_calibration() {
  Verdict v;
  const RiskParams p;
  const SourceReport report = single_event_report(3.0, 15.0, 2.0);
  RecipientLedger ledger("rcp");
  ledger.set("src", source_contribution(report, "rcp", p));
  const double r = ledger.total();
  v.check(std::abs(r - 1.83) <= 0.005, "risk " + num(r, 8) + " within 1.83 +/- 0.005");
  v.check(should_notify(ledger, p), "should_notify at r_min " + num(p.r_min) + " (risk " + num(r, 8) +
                                        (r >= p.r_min ? " >= " : " < ") + "threshold)");
  return v;
}

Verdict ac2_gaussian() {
  Verdict v;
  const EpiDistributions epi;
  const RiskParams p;
  const auto xs = sample_difference(epi, 1'000'000, 1);
  const FitReport fit = gaussian_fit_report(xs, p.mu0, p.sigma0);
  v.check(fit.ks_statistic < 0.05, "KS " + num(fit.ks_statistic) + " < 0.05");
  v.check(fit.sample_mean >= -0.7 && fit.sample_mean <= -0.1, "mean " + num(fit.sample_mean) + " in [-0.7, -0.1]");
  v.check(fit.sample_sd >= 2.5 && fit.sample_sd <= 3.1, "sd " + num(fit.sample_sd) + " in [2.5, 3.1]");
  v.check(fit.sample_skewness < 0.0, "skewness " + num(fit.sample_skewness) + " < 0");
  return v;
}

Verdict ac3_oracle() {
  Verdict v;
  const EpiDistributions epi;
  const ProbParams params{0.9, 0.175, build_sum_cdf(epi, 1'000'000, 0.05, 1)};
  constexpr double kDay = kMinutesPerDay;
  const std::vector<RecipientExposure> exposures{
      {"one", {{0.0, 1.83}}},
      {"two", {{0.0, 1.0}, {2 * kDay, 2.5}}},
      {"three", {{0.0, 0.8}, {1.5 * kDay, 1.5}, {4 * kDay, 3.0}}},
  };
  std::uint64_t seed = 100;
  for (const RecipientExposure& e : exposures) {
    const double latest = e.latest_event_time();
    std::vector<double> times;
    for (double d : {0.0, 4.0, 8.0, 12.0, 18.0}) times.push_back(latest + d * kDay);
    const auto mc = testing::simulate_symptom_free(e, params.nu, epi, times, 1'000'000, ++seed);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double closed = symptom_free_infection_probability(e, times[k], params);
      const double se = mc[k].standard_error;
      const double z = se > 0 ? std::abs(closed - mc[k].frequency) / se : 0.0;
      const double independent = testing::independent_model_probability(e, times[k], params.nu, params.sum_cdf);
      v.check(std::abs(closed - mc[k].frequency) <= 3.0 * se + 1e-12,
              std::to_string(e.events.size()) + " event(s), t-t_last=" + num((times[k] - latest) / kDay) +
                  "d: closed " + num(closed) + " vs MC " + num(mc[k].frequency) + " (" + num(z, 3) +
                  " SE; independent-model " + num(independent) + ")");
    }
  }
  return v;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

Verdict ac4_decay() {
  Verdict v;
  const auto dir = std::filesystem::temp_directory_path() / "riskscore_acceptance";
  std::filesystem::create_directories(dir);
  const std::vector<double> probs{0.05, 0.175, 0.3, 0.5, 0.7, 0.9, 0.99};
  const auto outcome = cli::cmd_decay_curve(EngineConfig{}, {dir / "decay.csv", probs});
  v.check(outcome.exit_code == 0, "decay-curve exit code " + std::to_string(outcome.exit_code));

  std::map<double, std::vector<std::pair<double, double>>> columns;
  const auto lines = read_lines(dir / "decay.csv");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row(lines[i]);
    std::string t, p, value;
    std::getline(row, t, ',');
    std::getline(row, p, ',');
    std::getline(row, value, ',');
    columns[std::stod(p)].emplace_back(std::stod(t), std::stod(value));
  }
  v.check(columns.size() == probs.size(), std::to_string(columns.size()) + " columns");
  for (const auto& [p, col] : columns) {
    bool monotone = true;
    for (std::size_t k = 1; k < col.size(); ++k) monotone = monotone && col[k].second <= col[k - 1].second;
    v.check(col.front().first == 0.0 && std::abs(col.front().second - p) < 1e-12 && monotone &&
                col.back().second < 0.005,
            "p=" + num(p) + ": starts " + num(col.front().second) + ", non-increasing=" +
                (monotone ? "yes" : "no") + ", ends " + num(col.back().second) + " at " +
                num(col.back().first) + "d");
  }
  std::filesystem::remove_all(dir);
  return v;
}

Verdict ac5_decascade() {
  Verdict v;
  const RiskParams p;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> risk(0.0, 3.0);
  std::uniform_int_distribution<int> n_sources(1, 4);
  std::size_t cases = 0, guard_violations = 0, sole_missed = 0, sole_cases = 0, guarded_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<NotificationState> states;
    for (int r = 0; r < 8; ++r) {
      RecipientLedger ledger("r" + std::to_string(r));
      const int n = n_sources(rng);
      // Sources drawn without replacement from s0..s5; s0 is the one tested.
      std::vector<int> ids{0, 1, 2, 3, 4, 5};
      std::shuffle(ids.begin(), ids.end(), rng);
      for (int s = 0; s < n; ++s) {
        const double a = risk(rng);
        const Minutes t = std::uniform_int_distribution<Minutes>(0, 1000)(rng);
        ledger.set("s" + std::to_string(ids[s]), {a, {{0, t, a}}});
      }
      NotificationState st{ledger.recipient_id(), {}, {}, ledger};
      if (should_notify(ledger, p)) st.notify(0);
      states.push_back(std::move(st));
    }
    const auto before = states;
    const auto records = decascade(states, {"s0", 2000}, p);
    for (std::size_t k = 0; k < records.size(); ++k) {
      ++cases;
      const auto& b = before[k];
      const bool sole = b.ledger.per_source().size() == 1 && b.ledger.find("s0");
      if (records[k].outcome == Outcome::Released && records[k].new_total >= p.r_min) ++guard_violations;
      if (b.notified() && records[k].new_total >= p.r_min) ++guarded_cases;
      if (b.notified() && sole) {
        ++sole_cases;
        if (records[k].outcome != Outcome::Released) ++sole_missed;
      }
    }
  }
  v.check(cases >= 1000, std::to_string(cases) + " recipient cases");
  v.check(guard_violations == 0, std::to_string(guard_violations) + " releases with post-removal total >= r_min (" +
                                     std::to_string(guarded_cases) + " guarded cases)");
  v.check(sole_missed == 0 && sole_cases > 0,
          std::to_string(sole_missed) + " of " + std::to_string(sole_cases) + " sole-source recipients not released");
  return v;
}

Verdict ac6_inference() {
  Verdict v;
  const EngineConfig config;
  const OutcomeDataset data = simulate_outcomes(0.3, 500, {0.5, 3.0}, 2024);
  const Posterior grid = posterior_grid(data, config.prob.grid_size);
  v.check(std::abs(grid.mean() - 0.3) <= 0.05, "grid mean " + num(grid.mean()) + " within 0.3 +/- 0.05");
  const Posterior chain = posterior_mcmc(data, config.prob.mcmc_samples, config.prob.burn_in(),
                                         config.prob.mcmc_step, config.prob.seed);
  v.check(std::abs(chain.mean() - grid.mean()) <= 0.02,
          "MCMC mean " + num(chain.mean()) + " within grid +/- 0.02 (acceptance " +
              num(chain.diagnostics.acceptance_rate, 3) + ", ess " + num(chain.diagnostics.ess, 4) + ")");

  const Posterior prior = posterior_mcmc({}, 10'000, config.prob.burn_in(), config.prob.mcmc_step, config.prob.seed);
  std::vector<double> xs = *prior.samples;
  std::sort(xs.begin(), xs.end());
  double ks = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ks = std::max({ks, static_cast<double>(i + 1) / n - xs[i], xs[i] - static_cast<double>(i) / n});
  }
  v.check(ks < 0.05, "empty-data MCMC KS vs uniform " + num(ks) + " < 0.05 at 10^4 samples");
  const Posterior flat = posterior_grid({}, config.prob.grid_size);
  const bool uniform = std::all_of(flat.grid_density.begin(), flat.grid_density.end(),
                                   [](double d) { return std::abs(d - 1.0) < 1e-12; });
  v.check(uniform, "empty-data grid posterior is the uniform density");
  return v;
}

Verdict ac7_invariants() {
  Verdict v;
  const RiskParams p;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> minutes(0.5, 120.0);
  std::uniform_real_distribution<double> metres(0.2, 10.0);
  std::uniform_int_distribution<Minutes> offset(-p.delta_t_max + 1, 3 * kMinutesPerDay);
  constexpr int kCases = 1000;

  int window = 0, linear = 0, monotone = 0, additive = 0, journal = 0;
  for (int i = 0; i < kCases; ++i) {
    const Minutes onset = noon_of_day(18'000 + std::uniform_int_distribution<Minutes>(0, 500)(rng));
    SourceReport r{"s", onset, onset + 5 * kMinutesPerDay, {}, 1.0};
    const double m = minutes(rng);
    const double d = metres(rng);

    // Strict lower boundary: onset - start == delta_t_max is excluded.
    ContactEvent boundary{"s", "x", onset - p.delta_t_max, m, d, {}, 1.0};
    ContactEvent inside = boundary;
    inside.start_time += 1;
    SourceReport with_boundary = r;
    with_boundary.events = {boundary};
    SourceReport with_inside = r;
    with_inside.events = {inside};
    window += !in_window(boundary, r, p) && in_window(inside, r, p) && pair_risk(with_boundary, "x", p) == 0.0 &&
                      pair_risk(with_inside, "x", p) > 0.0
                  ? 1
                  : 0;

    ContactEvent e{"s", "x", onset + offset(rng), m, d, {}, 1.0};
    ContactEvent twice = e;
    twice.duration_min *= 2.0;
    linear += event_risk(twice, r, p) == 2.0 * event_risk(e, r, p) ? 1 : 0;

    ContactEvent farther = e;
    farther.distance_m = d + metres(rng);
    monotone += event_risk(farther, r, p) <= event_risk(e, r, p) ? 1 : 0;

    std::vector<SourceReport> reports;
    double pair_sum = 0.0;
    for (int s = 0; s < 4; ++s) {
      SourceReport rs = testing::random_report(rng, "s" + std::to_string(s), 1);
      reports.push_back(rs);
      pair_sum += pair_risk(rs, "r0", p);
    }
    const double total = total_risk(reports, "r0", p).total();
    additive += std::abs(total - pair_sum) <= 1e-12 * std::max(1.0, pair_sum) ? 1 : 0;

    EventStore store;
    for (int op = 0, next = 0; op < 6; ++op) {
      if (next > 0 && std::bernoulli_distribution(0.3)(rng)) {
        const auto& src = store.reports().begin()->second;
        store.apply_negative_test({src.source_id, src.symptom_onset_time}, p);
      } else {
        store.ingest_report(testing::random_report(rng, "s" + std::to_string(next++), 5), p);
      }
    }
    std::string text;
    for (const auto& entry : store.journal()) text += to_json_line(entry) + "\n";
    std::istringstream in(text);
    journal += EventStore::replay(read_journal(in), p) == store && consistent_with_journal(store, p) ? 1 : 0;
  }
  const auto line = [&](int passed, const std::string& what) {
    v.check(passed == kCases, what + ": " + std::to_string(passed) + "/" + std::to_string(kCases));
  };
  line(window, "window exclusion at the strict boundary");
  line(linear, "duration linearity");
  line(monotone, "distance monotonicity");
  line(additive, "ledger additivity");
  line(journal, "journal rebuild equals incremental state");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"AC1 calibration point", ac1_calibration},  {"AC2 Gaussian approximation", ac2_gaussian},
      {"AC3 closed form vs Monte Carlo", ac3_oracle}, {"AC4 decay limits", ac4_decay},
      {"AC5 de-cascading safety", ac5_decascade},  {"AC6 nu recovery", ac6_inference},
      {"AC7 engine invariants", ac7_invariants},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict verdict;
    try {
      verdict = run();
    } catch (const std::exception& e) {
      verdict.check(false, std::string("threw: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.2fs)\n", verdict.pass ? "PASS" : "FAIL", name.c_str(), seconds);
    for (const std::string& note : verdict.notes) std::printf("    %s\n", note.c_str());
    failures += verdict.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
