#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace riskscore {

using SourceId = std::string;
using RecipientId = std::string;

/// Absolute time in whole minutes since the Unix epoch (UTC).
using Minutes = std::int64_t;

inline constexpr Minutes kMinutesPerDay = 1440;
inline constexpr Minutes kNoonOffset = 720;

/// One recorded proximity interaction uploaded by a source.
struct ContactEvent {
  SourceId source_id;
  RecipientId recipient_id;
  Minutes start_time = 0;
  double duration_min = 0.0;
  std::optional<double> distance_m;
  std::optional<double> rssi_dbm;
  double context_factor = 1.0;

  bool operator==(const ContactEvent&) const = default;
};

/// A symptomatic source's upload.
struct SourceReport {
  SourceId source_id;
  /// Marked to noon (UTC) of the day of symptom onset.
  Minutes symptom_onset_time = kNoonOffset;
  Minutes report_time = kNoonOffset;
  std::vector<ContactEvent> events;
  double source_weight = 1.0;

  bool operator==(const SourceReport&) const = default;
};

/// Noon of the UTC day containing `t`.
Minutes noon_of_day(Minutes t);

/// Throws ValidationError listing every field-level problem, such as an
/// onset not at noon, an event after report_time, a non-positive duration
/// or an event carrying neither distance nor RSSI.
void validate(const SourceReport& report);

struct RiskParams {
  double d_min = 1.0;
  double mu0 = -0.3;
  double sigma0 = 2.75;
  Minutes delta_t_max = 10080;
  double r_min = 1.83;
  /// Log-distance path-loss model: RSSI observed at rssi_ref_distance.
  double rssi_ref = -59.0;
  double rssi_ref_distance = 1.0;
  double path_loss_exponent = 2.0;
  /// When false, events after the source's symptom onset are ignored.
  bool include_post_onset_events = true;

  /// Throws ValidationError naming each violated invariant.
  void validate() const;

  bool operator==(const RiskParams&) const = default;
};

/// min(1, d_min^2 / d^2). Throws ParameterError for d <= 0.
double distance_factor(double distance_m, const RiskParams& params);

/// Inverts the log-distance path-loss model:
/// d = d_ref * 10^((rssi_ref - rssi) / (10 n)).
double rssi_to_distance(double rssi_dbm, const RiskParams& params);

/// Gaussian weight exp(-((days - mu0) / sigma0)^2 / 2) for an offset in
/// real-valued days from the noon-marked onset.
double infectiousness_factor_days(double days_from_onset, const RiskParams& params);
double infectiousness_factor(Minutes event_start, Minutes symptom_onset, const RiskParams& params);

/// Distance for an event, preferring an explicit measurement over RSSI.
/// Throws DataError when neither is present.
double resolve_distance(const ContactEvent& event, const RiskParams& params);

/// alpha * c * D * I * duration for one event.
double event_risk(const ContactEvent& event, const SourceReport& report, const RiskParams& params);

/// Whether the event falls inside the aggregation window
/// (onset - delta_t_max, +inf), or (onset - delta_t_max, onset] when
/// post-onset events are excluded.
bool in_window(const ContactEvent& event, const SourceReport& report, const RiskParams& params);

struct EventRisk {
  std::size_t event_index = 0;  ///< position in the report's event list
  Minutes start_time = 0;
  double risk = 0.0;

  bool operator==(const EventRisk&) const = default;
};

/// One source's share of a recipient's score, with its per-event terms.
struct SourceContribution {
  double risk = 0.0;
  std::vector<EventRisk> event_risks;

  bool operator==(const SourceContribution&) const = default;
};

/// r_{i,j} with the terms that make it up, windowed events only.
SourceContribution source_contribution(const SourceReport& report, const RecipientId& recipient,
                                       const RiskParams& params);

/// r_{i,j}: windowed sum of event risks from one source to one recipient.
double pair_risk(const SourceReport& report, const RecipientId& recipient,
                 const RiskParams& params);

/// Per-recipient decomposition of risk by source.
///
/// The total is always the sum of the per-source risks taken in source-id
/// order, so two ledgers holding equal contributions compare bit-equal
/// regardless of how they were assembled.
class RecipientLedger {
 public:
  RecipientLedger() = default;
  explicit RecipientLedger(RecipientId recipient_id) : recipient_id_(std::move(recipient_id)) {}

  const RecipientId& recipient_id() const noexcept { return recipient_id_; }
  const std::map<SourceId, SourceContribution>& per_source() const noexcept { return per_source_; }
  double total() const noexcept { return total_; }

  const SourceContribution* find(const SourceId& source) const;
  void set(const SourceId& source, SourceContribution contribution);
  void erase(const SourceId& source);

  bool operator==(const RecipientLedger&) const = default;

 private:
  void resum();

  RecipientId recipient_id_;
  std::map<SourceId, SourceContribution> per_source_;
  double total_ = 0.0;
};

/// r_j over all reports. Throws DataError on duplicate source ids.
RecipientLedger total_risk(std::span<const SourceReport> reports, const RecipientId& recipient,
                           const RiskParams& params);

/// Distinct recipient ids referenced by a report, sorted.
std::vector<RecipientId> recipients_of(const SourceReport& report);

}  // namespace riskscore
