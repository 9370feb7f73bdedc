#include <gtest/gtest.h>

#include <random>

#include "riskscore/notifier.hpp"

namespace riskscore {
namespace {

const RiskParams kDefaults{};

RecipientLedger ledger_of(const RecipientId& id, std::vector<std::pair<SourceId, double>> parts,
                          Minutes start = 0) {
  RecipientLedger ledger(id);
  for (const auto& [source, risk] : parts) ledger.set(source, {risk, {{0, start, risk}}});
  return ledger;
}

NotificationState notified_state(const RecipientId& id, RecipientLedger ledger, Minutes at = 100) {
  NotificationState s{id, {}, {}, std::move(ledger)};
  s.notify(at);
  return s;
}

TEST(ShouldNotify, ThresholdIsInclusive) {
  EXPECT_TRUE(should_notify(ledger_of("a", {{"s", 1.83}}), kDefaults));
  EXPECT_FALSE(should_notify(ledger_of("a", {{"s", 1.82999}}), kDefaults));
  EXPECT_FALSE(should_notify(RecipientLedger("a"), kDefaults));
}

TEST(AdviceActive, HalfOpenFourteenDayWindow) {
  NotificationState s{"a", {}, {}, RecipientLedger("a")};
  EXPECT_FALSE(advice_active(s, 0));
  s.notify(1000);
  EXPECT_EQ(*s.advice_until, 1000 + 14 * 1440);
  EXPECT_TRUE(advice_active(s, 1000));
  EXPECT_TRUE(advice_active(s, 1000 + 14 * 1440 - 1));
  EXPECT_FALSE(advice_active(s, 1000 + 14 * 1440));
  EXPECT_FALSE(advice_active(s, 999));
}

TEST(Decascade, SoleSourceIsReleased) {
  std::vector<NotificationState> states{notified_state("a", ledger_of("a", {{"neg", 2.0}}))};
  const auto out = decascade(states, {"neg", 50}, kDefaults);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].outcome, Outcome::Released);
  EXPECT_EQ(out[0].old_total, 2.0);
  EXPECT_EQ(out[0].new_total, 0.0);
  EXPECT_FALSE(states[0].notified());
  EXPECT_EQ(states[0].ledger.total(), 0.0);
}

TEST(Decascade, FallsBelowThresholdIsReleased) {
  std::vector<NotificationState> states{
      notified_state("a", ledger_of("a", {{"neg", 1.0}, {"other", 1.5}}))};
  const auto out = decascade(states, {"neg", 50}, kDefaults);
  EXPECT_EQ(out[0].outcome, Outcome::Released);
  EXPECT_DOUBLE_EQ(out[0].new_total, 1.5);
}

TEST(Decascade, StillAboveThresholdStaysNotified) {
  std::vector<NotificationState> states{
      notified_state("a", ledger_of("a", {{"neg", 0.5}, {"other", 2.0}}))};
  const auto out = decascade(states, {"neg", 50}, kDefaults);
  EXPECT_EQ(out[0].outcome, Outcome::StillNotified);
  EXPECT_DOUBLE_EQ(out[0].new_total, 2.0);
  EXPECT_TRUE(states[0].notified());
}

TEST(Decascade, OnlyEventsBeforeTheTestAreZeroed) {
  RecipientLedger ledger("a");
  ledger.set("neg", {3.0, {{0, 10, 1.0}, {1, 90, 2.0}}});
  std::vector<NotificationState> states{notified_state("a", ledger)};
  const auto out = decascade(states, {"neg", 50}, kDefaults);
  EXPECT_EQ(out[0].outcome, Outcome::StillNotified);
  EXPECT_EQ(states[0].ledger.total(), 2.0);

  // A test that predates every event covers nothing.
  std::vector<NotificationState> early{notified_state("a", ledger)};
  EXPECT_EQ(decascade(early, {"neg", 5}, kDefaults)[0].outcome, Outcome::Unaffected);
  EXPECT_EQ(early[0].ledger.total(), 3.0);
}

TEST(Decascade, UnnotifiedRecipientsAreZeroedButUnaffected) {
  std::vector<NotificationState> states{{"a", {}, {}, ledger_of("a", {{"neg", 1.0}})},
                                        {"b", {}, {}, ledger_of("b", {{"other", 1.0}})}};
  const auto out = decascade(states, {"neg", 50}, kDefaults);
  EXPECT_EQ(out[0].outcome, Outcome::Unaffected);
  EXPECT_EQ(out[1].outcome, Outcome::Unaffected);
  EXPECT_EQ(states[0].ledger.total(), 0.0);
  EXPECT_EQ(states[1].ledger.total(), 1.0);
}

TEST(Decascade, UnknownSourceIsANoOp) {
  std::vector<NotificationState> states{notified_state("a", ledger_of("a", {{"s", 2.0}}))};
  const auto before = states;
  const auto out = decascade(states, {"ghost", 50}, kDefaults);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].outcome, Outcome::UnknownSource);
  EXPECT_EQ(states, before);
}

TEST(Decascade, PropertiesOverRandomStates) {
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> risk(0.0, 2.5);
  std::uniform_int_distribution<int> sources(1, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<NotificationState> states;
    for (int r = 0; r < 6; ++r) {
      RecipientLedger ledger("r" + std::to_string(r));
      const int n = sources(rng);
      for (int s = 0; s < n; ++s) {
        const Minutes t = std::uniform_int_distribution<Minutes>(0, 100)(rng);
        const double a = risk(rng);
        ledger.set("s" + std::to_string(s), {a, {{0, t, a}}});
      }
      NotificationState st{ledger.recipient_id(), {}, {}, ledger};
      if (should_notify(ledger, kDefaults)) st.notify(0);
      states.push_back(std::move(st));
    }
    const auto before = states;
    const NegativeTestEvent neg{"s0", 101};  // after every event
    const auto out = decascade(states, neg, kDefaults);
    for (std::size_t k = 0; k < states.size(); ++k) {
      const double removed = before[k].ledger.find("s0") ? before[k].ledger.find("s0")->risk : 0.0;
      EXPECT_NEAR(out[k].new_total, out[k].old_total - removed, 1e-12);
      if (out[k].outcome == Outcome::Released) EXPECT_LT(out[k].new_total, kDefaults.r_min);
      if (before[k].notified() && out[k].new_total >= kDefaults.r_min) {
        EXPECT_EQ(out[k].outcome, Outcome::StillNotified);
      }
    }
    auto again = states;
    decascade(again, neg, kDefaults);
    EXPECT_EQ(again, states);
  }
}

TEST(Outcome, StringRoundTrip) {
  for (Outcome o : {Outcome::Unaffected, Outcome::Released, Outcome::StillNotified,
                    Outcome::UnknownSource}) {
    EXPECT_EQ(outcome_from_string(to_string(o)), o);
  }
  EXPECT_FALSE(outcome_from_string("nope"));
}

}  // namespace
}  // namespace riskscore
