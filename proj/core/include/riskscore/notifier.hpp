#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "riskscore/risk_engine.hpp"

namespace riskscore {

/// Length of the advice period that follows a notification.
inline constexpr Minutes kAdvicePeriod = 14 * kMinutesPerDay;

struct NotificationState {
  RecipientId recipient_id;
  std::optional<Minutes> notified_at;
  std::optional<Minutes> advice_until;
  RecipientLedger ledger;

  bool notified() const noexcept { return notified_at.has_value(); }
  /// (Re)starts the advice clock at `at`.
  void notify(Minutes at);
  void release();

  bool operator==(const NotificationState&) const = default;
};

struct NegativeTestEvent {
  SourceId source_id;
  Minutes test_time = 0;

  bool operator==(const NegativeTestEvent&) const = default;
};

enum class Outcome { Unaffected, Released, StillNotified, UnknownSource };

std::string_view to_string(Outcome outcome);
std::optional<Outcome> outcome_from_string(std::string_view text);

struct DecascadeRecord {
  RecipientId recipient_id;
  Outcome outcome = Outcome::Unaffected;
  double old_total = 0.0;
  double new_total = 0.0;
  SourceId cause_source_id;
  Minutes test_time = 0;

  bool operator==(const DecascadeRecord&) const = default;
};

/// total >= r_min.
bool should_notify(const RecipientLedger& ledger, const RiskParams& params);

/// Whether `now` falls in the half-open advice window [notified_at, advice_until).
bool advice_active(const NotificationState& state, Minutes now);

/// Zeroes the negative-tested source's event risks before `test_time`
/// in every ledger that holds them, then re-checks the threshold.
///
/// A notified recipient is released only when the revised total drops
/// below r_min. The update is all-or-nothing across `states`. If no
/// state has an entry for the source, a single UnknownSource record is
/// returned and nothing changes. Records follow the order of `states`.
std::vector<DecascadeRecord> decascade(std::span<NotificationState> states,
                                       const NegativeTestEvent& negative,
                                       const RiskParams& params);

}  // namespace riskscore
