#include "riskscore/risk_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "riskscore/errors.hpp"

namespace riskscore {

Minutes noon_of_day(Minutes t) {
  const Minutes day = t >= 0 ? t / kMinutesPerDay : -((-t + kMinutesPerDay - 1) / kMinutesPerDay);
  return day * kMinutesPerDay + kNoonOffset;
}

void validate(const SourceReport& report) {
  std::vector<std::string> problems;
  if (report.source_id.empty()) problems.emplace_back("source_id: must not be empty");
  if (noon_of_day(report.symptom_onset_time) != report.symptom_onset_time) {
    problems.emplace_back("symptom_onset_min: must be marked to noon of the onset day");
  }
  if (!(report.source_weight >= 0.0) || !std::isfinite(report.source_weight)) {
    problems.emplace_back("source_weight: must be a finite value >= 0");
  }
  for (std::size_t k = 0; k < report.events.size(); ++k) {
    const ContactEvent& e = report.events[k];
    const std::string path = "events[" + std::to_string(k) + "].";
    if (e.source_id != report.source_id) {
      problems.push_back(path + "source_id: '" + e.source_id + "' does not match report source '" +
                         report.source_id + "'");
    }
    if (e.recipient_id.empty()) problems.push_back(path + "recipient_id: must not be empty");
    if (!(e.duration_min > 0.0) || !std::isfinite(e.duration_min)) {
      problems.push_back(path + "duration_min: must be > 0");
    }
    if (!e.distance_m && !e.rssi_dbm) {
      problems.push_back(path + "distance_m: one of distance_m or rssi_dbm is required");
    }
    if (e.distance_m && !(*e.distance_m > 0.0)) {
      problems.push_back(path + "distance_m: must be > 0");
    }
    if (e.rssi_dbm && !std::isfinite(*e.rssi_dbm)) {
      problems.push_back(path + "rssi_dbm: must be finite");
    }
    if (!(e.context_factor >= 0.0) || !std::isfinite(e.context_factor)) {
      problems.push_back(path + "context_factor: must be a finite value >= 0");
    }
    if (e.start_time > report.report_time) {
      problems.push_back(path + "start_time_min: after the source's report time");
    }
  }
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

void RiskParams::validate() const {
  std::vector<std::string> problems;
  if (!(d_min > 0.0)) problems.emplace_back("risk.d_min: must be > 0");
  if (!(sigma0 > 0.0)) problems.emplace_back("risk.sigma0: must be > 0");
  if (!std::isfinite(mu0)) problems.emplace_back("risk.mu0: must be finite");
  if (!(delta_t_max > 0)) problems.emplace_back("risk.delta_t_max: must be > 0");
  if (!(r_min > 0.0)) problems.emplace_back("risk.r_min: must be > 0");
  if (!std::isfinite(rssi_ref)) problems.emplace_back("risk.rssi_ref: must be finite");
  if (!(rssi_ref_distance > 0.0)) problems.emplace_back("risk.rssi_ref_distance: must be > 0");
  if (!(path_loss_exponent > 0.0)) problems.emplace_back("risk.path_loss_exponent: must be > 0");
  if (!problems.empty()) throw ValidationError(std::move(problems));
}

double distance_factor(double distance_m, const RiskParams& params) {
  if (!(distance_m > 0.0)) throw ParameterError("distance must be > 0");
  return std::min(1.0, (params.d_min * params.d_min) / (distance_m * distance_m));
}

double rssi_to_distance(double rssi_dbm, const RiskParams& params) {
  if (!(params.path_loss_exponent > 0.0)) throw ParameterError("path_loss_exponent must be > 0");
  return params.rssi_ref_distance *
         std::pow(10.0, (params.rssi_ref - rssi_dbm) / (10.0 * params.path_loss_exponent));
}

double infectiousness_factor_days(double days_from_onset, const RiskParams& params) {
  const double z = (days_from_onset - params.mu0) / params.sigma0;
  return std::exp(-0.5 * z * z);
}

double infectiousness_factor(Minutes event_start, Minutes symptom_onset, const RiskParams& params) {
  const double days =
      static_cast<double>(event_start - symptom_onset) / static_cast<double>(kMinutesPerDay);
  return infectiousness_factor_days(days, params);
}

double resolve_distance(const ContactEvent& event, const RiskParams& params) {
  if (event.distance_m) return *event.distance_m;
  if (event.rssi_dbm) return rssi_to_distance(*event.rssi_dbm, params);
  throw DataError("contact event from '" + event.source_id + "' to '" + event.recipient_id +
                  "' has neither distance nor RSSI");
}

double event_risk(const ContactEvent& event, const SourceReport& report, const RiskParams& params) {
  const double d = resolve_distance(event, params);
  return report.source_weight * event.context_factor * distance_factor(d, params) *
         infectiousness_factor(event.start_time, report.symptom_onset_time, params) *
         event.duration_min;
}

bool in_window(const ContactEvent& event, const SourceReport& report, const RiskParams& params) {
  if (!(report.symptom_onset_time - params.delta_t_max < event.start_time)) return false;
  return params.include_post_onset_events || event.start_time <= report.symptom_onset_time;
}

SourceContribution source_contribution(const SourceReport& report, const RecipientId& recipient,
                                       const RiskParams& params) {
  SourceContribution out;
  for (std::size_t k = 0; k < report.events.size(); ++k) {
    const ContactEvent& e = report.events[k];
    if (e.recipient_id != recipient || !in_window(e, report, params)) continue;
    const double r = event_risk(e, report, params);
    out.event_risks.push_back({k, e.start_time, r});
    out.risk += r;
  }
  return out;
}

double pair_risk(const SourceReport& report, const RecipientId& recipient,
                 const RiskParams& params) {
  return source_contribution(report, recipient, params).risk;
}

const SourceContribution* RecipientLedger::find(const SourceId& source) const {
  const auto it = per_source_.find(source);
  return it == per_source_.end() ? nullptr : &it->second;
}

void RecipientLedger::set(const SourceId& source, SourceContribution contribution) {
  per_source_.insert_or_assign(source, std::move(contribution));
  resum();
}

void RecipientLedger::erase(const SourceId& source) {
  per_source_.erase(source);
  resum();
}

void RecipientLedger::resum() {
  total_ = 0.0;
  for (const auto& [source, contribution] : per_source_) total_ += contribution.risk;
}

RecipientLedger total_risk(std::span<const SourceReport> reports, const RecipientId& recipient,
                           const RiskParams& params) {
  RecipientLedger ledger(recipient);
  std::set<SourceId> seen;
  for (const SourceReport& report : reports) {
    if (!seen.insert(report.source_id).second) {
      throw DataError("duplicate report for source '" + report.source_id + "'");
    }
    SourceContribution c = source_contribution(report, recipient, params);
    if (!c.event_risks.empty()) ledger.set(report.source_id, std::move(c));
  }
  return ledger;
}

std::vector<RecipientId> recipients_of(const SourceReport& report) {
  std::set<RecipientId> ids;
  for (const ContactEvent& e : report.events) ids.insert(e.recipient_id);
  return {ids.begin(), ids.end()};
}

}  // namespace riskscore
