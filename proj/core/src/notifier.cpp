#include "riskscore/notifier.hpp"

#include <algorithm>

namespace riskscore {

void NotificationState::notify(Minutes at) {
  notified_at = at;
  advice_until = at + kAdvicePeriod;
}

void NotificationState::release() {
  notified_at.reset();
  advice_until.reset();
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Unaffected: return "unaffected";
    case Outcome::Released: return "released";
    case Outcome::StillNotified: return "still_notified";
    case Outcome::UnknownSource: return "unknown_source";
  }
  return "unaffected";
}

std::optional<Outcome> outcome_from_string(std::string_view text) {
  for (Outcome o : {Outcome::Unaffected, Outcome::Released, Outcome::StillNotified,
                    Outcome::UnknownSource}) {
    if (to_string(o) == text) return o;
  }
  return std::nullopt;
}

bool should_notify(const RecipientLedger& ledger, const RiskParams& params) {
  return ledger.total() >= params.r_min;
}

bool advice_active(const NotificationState& state, Minutes now) {
  return state.notified_at && state.advice_until && *state.notified_at <= now &&
         now < *state.advice_until;
}

std::vector<DecascadeRecord> decascade(std::span<NotificationState> states,
                                       const NegativeTestEvent& negative,
                                       const RiskParams& params) {
  const bool known = std::any_of(states.begin(), states.end(), [&](const NotificationState& s) {
    return s.ledger.find(negative.source_id) != nullptr;
  });
  if (!known) {
    return {{"", Outcome::UnknownSource, 0.0, 0.0, negative.source_id, negative.test_time}};
  }

  std::vector<NotificationState> revised(states.begin(), states.end());
  std::vector<DecascadeRecord> records;
  records.reserve(states.size());

  for (NotificationState& state : revised) {
    DecascadeRecord rec{state.recipient_id, Outcome::Unaffected, state.ledger.total(),
                        state.ledger.total(), negative.source_id, negative.test_time};

    const SourceContribution* entry = state.ledger.find(negative.source_id);
    const bool covers = entry && std::any_of(entry->event_risks.begin(), entry->event_risks.end(),
                                             [&](const EventRisk& e) {
                                               return e.start_time < negative.test_time;
                                             });
    if (covers) {
      SourceContribution zeroed = *entry;
      zeroed.risk = 0.0;
      for (EventRisk& e : zeroed.event_risks) {
        if (e.start_time < negative.test_time) e.risk = 0.0;
        zeroed.risk += e.risk;
      }
      state.ledger.set(negative.source_id, std::move(zeroed));
      rec.new_total = state.ledger.total();

      if (state.notified()) {
        if (should_notify(state.ledger, params)) {
          rec.outcome = Outcome::StillNotified;
        } else {
          rec.outcome = Outcome::Released;
          state.release();
        }
      }
    }
    records.push_back(std::move(rec));
  }

  std::move(revised.begin(), revised.end(), states.begin());
  return records;
}

}  // namespace riskscore
