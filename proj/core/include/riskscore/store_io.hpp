#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "riskscore/notifier.hpp"
#include "riskscore/risk_engine.hpp"

namespace riskscore {

/// Result of reading a line-oriented file: the records that parsed and
/// one message per bad line, prefixed "line N:".
template <class T>
struct Parsed {
  std::vector<T> items;
  std::vector<std::string> errors;

  bool ok() const noexcept { return errors.empty(); }
};

/// A report header line without its events.
struct ReportHeader {
  SourceId source_id;
  Minutes symptom_onset_time = 0;
  Minutes report_time = 0;
  double source_weight = 1.0;
};

// events.jsonl: {source_id, recipient_id, start_time_min, duration_min,
//                distance_m?, rssi_dbm?, context_factor?}
std::string to_json_line(const ContactEvent& event);
ContactEvent parse_event(std::string_view line);
Parsed<ContactEvent> read_events_jsonl(std::istream& in);

// reports.jsonl: {source_id, symptom_onset_min, report_min, source_weight?}
std::string to_json_line(const ReportHeader& header);
ReportHeader parse_report_header(std::string_view line);
Parsed<ReportHeader> read_reports_jsonl(std::istream& in);

/// Groups events under their report headers. Events whose source has no
/// header, duplicate headers and reports failing validate() are listed in
/// `errors`; reports come back ordered by source id.
Parsed<SourceReport> assemble_reports(std::span<const ReportHeader> headers,
                                      std::span<const ContactEvent> events);

// {recipient_id, outcome, old_total, new_total, cause_source_id, test_time}
std::string to_json_line(const DecascadeRecord& record);

/// One journal line: {op: "ingest"|"decascade", payload, ts}. The payload
/// is kept as compact JSON text.
struct JournalEntry {
  std::string op;
  std::string payload;
  Minutes ts = 0;

  bool operator==(const JournalEntry&) const = default;
};

std::string to_json_line(const JournalEntry& entry);

/// Throws DataError naming the first malformed line.
std::vector<JournalEntry> read_journal(std::istream& in);

/// Reports, per-recipient notification state and the journal that
/// produced them.
///
/// Every mutation is journaled first-class, so replaying the journal
/// through a fresh store reproduces the state exactly, including
/// floating-point totals.
class EventStore {
 public:
  /// Scores a new source report into the ledgers of its recipients and
  /// notifies those whose total reaches r_min and who are not already
  /// under active advice at the report time. Returns the recipients
  /// whose ledgers changed, sorted.
  ///
  /// Throws ValidationError (with field paths) for an invalid report and
  /// DataError for a source that already reported.
  std::vector<RecipientId> ingest_report(const SourceReport& report, const RiskParams& params);

  /// De-cascades a negative test across all recipients. Repeating a test
  /// that was already applied changes nothing and returns the outcomes
  /// of the first application; the repeat is still journaled. An unknown
  /// source yields one UnknownSource record and is not journaled.
  std::vector<DecascadeRecord> apply_negative_test(const NegativeTestEvent& negative,
                                                   const RiskParams& params);

  const std::map<SourceId, SourceReport>& reports() const noexcept { return reports_; }
  const std::map<RecipientId, NotificationState>& states() const noexcept { return states_; }
  const std::vector<JournalEntry>& journal() const noexcept { return journal_; }
  std::map<RecipientId, RecipientLedger> ledgers() const;

  bool operator==(const EventStore&) const = default;

  /// Replays journal entries onto an empty store.
  static EventStore replay(std::span<const JournalEntry> journal, const RiskParams& params);

 private:
  void apply(const JournalEntry& entry, const RiskParams& params);

  std::map<SourceId, SourceReport> reports_;
  std::map<RecipientId, NotificationState> states_;
  std::map<std::pair<SourceId, Minutes>, std::vector<DecascadeRecord>> applied_tests_;
  std::vector<JournalEntry> journal_;
};

/// Fresh store rebuilt from `store`'s journal.
EventStore rebuild(const EventStore& store, const RiskParams& params);

/// Rebuild-and-compare check that the store's ledgers are what its
/// journal implies.
bool consistent_with_journal(const EventStore& store, const RiskParams& params);

inline constexpr std::string_view kJournalFile = "journal.jsonl";

/// Opens a store directory, replaying its journal. A missing directory
/// or journal gives an empty store.
EventStore load_store(const std::filesystem::path& dir, const RiskParams& params);
void save_store(const EventStore& store, const std::filesystem::path& dir);

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace riskscore
