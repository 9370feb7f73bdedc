#include "riskscore/store_io.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "riskscore/errors.hpp"

namespace riskscore {

namespace {

using nlohmann::json;

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw DataError("expected a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw DataError("unknown field '" + key + "'");
    }
  }
}

std::string require_string(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw DataError(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

Minutes require_minutes(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw DataError(std::string("'") + key + "' must be an integer number of minutes");
  }
  return it->get<Minutes>();
}

double require_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number()) throw DataError(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw DataError(std::string("'") + key + "' must be a number or null");
  return it->get<double>();
}

json event_json(const ContactEvent& e) {
  json j = {{"source_id", e.source_id},
            {"recipient_id", e.recipient_id},
            {"start_time_min", e.start_time},
            {"duration_min", e.duration_min}};
  if (e.distance_m) j["distance_m"] = *e.distance_m;
  if (e.rssi_dbm) j["rssi_dbm"] = *e.rssi_dbm;
  if (e.context_factor != 1.0) j["context_factor"] = e.context_factor;
  return j;
}

ContactEvent event_from_json(const json& j) {
  reject_unknown_keys(j, {"source_id", "recipient_id", "start_time_min", "duration_min",
                          "distance_m", "rssi_dbm", "context_factor"});
  ContactEvent e;
  e.source_id = require_string(j, "source_id");
  e.recipient_id = require_string(j, "recipient_id");
  e.start_time = require_minutes(j, "start_time_min");
  e.duration_min = require_number(j, "duration_min");
  e.distance_m = optional_number(j, "distance_m");
  e.rssi_dbm = optional_number(j, "rssi_dbm");
  e.context_factor = optional_number(j, "context_factor").value_or(1.0);
  return e;
}

json header_json(const ReportHeader& h) {
  return {{"source_id", h.source_id},
          {"symptom_onset_min", h.symptom_onset_time},
          {"report_min", h.report_time},
          {"source_weight", h.source_weight}};
}

ReportHeader header_from_json(const json& j) {
  ReportHeader h;
  h.source_id = require_string(j, "source_id");
  h.symptom_onset_time = require_minutes(j, "symptom_onset_min");
  h.report_time = require_minutes(j, "report_min");
  h.source_weight = optional_number(j, "source_weight").value_or(1.0);
  return h;
}

json report_json(const SourceReport& r) {
  json j = header_json({r.source_id, r.symptom_onset_time, r.report_time, r.source_weight});
  json events = json::array();
  for (const ContactEvent& e : r.events) events.push_back(event_json(e));
  j["events"] = std::move(events);
  return j;
}

SourceReport report_from_json(const json& j) {
  reject_unknown_keys(j, {"source_id", "symptom_onset_min", "report_min", "source_weight", "events"});
  const ReportHeader h = header_from_json(j);
  SourceReport r{h.source_id, h.symptom_onset_time, h.report_time, {}, h.source_weight};
  const auto it = j.find("events");
  if (it == j.end() || !it->is_array()) throw DataError("'events' must be an array");
  for (const json& e : *it) r.events.push_back(event_from_json(e));
  return r;
}

template <class T, class Parse>
Parsed<T> read_lines(std::istream& in, Parse parse) {
  Parsed<T> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.items.push_back(parse(line));
    } catch (const DataError& e) {
      out.errors.push_back("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

constexpr std::string_view kIngest = "ingest";
constexpr std::string_view kDecascade = "decascade";

}  // namespace

std::string to_json_line(const ContactEvent& event) { return event_json(event).dump(); }

ContactEvent parse_event(std::string_view line) { return event_from_json(parse_object(line)); }

Parsed<ContactEvent> read_events_jsonl(std::istream& in) {
  return read_lines<ContactEvent>(in, [](const std::string& l) { return parse_event(l); });
}

std::string to_json_line(const ReportHeader& header) { return header_json(header).dump(); }

ReportHeader parse_report_header(std::string_view line) {
  const json j = parse_object(line);
  reject_unknown_keys(j, {"source_id", "symptom_onset_min", "report_min", "source_weight"});
  return header_from_json(j);
}

Parsed<ReportHeader> read_reports_jsonl(std::istream& in) {
  return read_lines<ReportHeader>(in, [](const std::string& l) { return parse_report_header(l); });
}

Parsed<SourceReport> assemble_reports(std::span<const ReportHeader> headers,
                                      std::span<const ContactEvent> events) {
  Parsed<SourceReport> out;
  std::map<SourceId, SourceReport> by_source;
  for (const ReportHeader& h : headers) {
    const auto [it, inserted] = by_source.try_emplace(
        h.source_id, SourceReport{h.source_id, h.symptom_onset_time, h.report_time, {}, h.source_weight});
    if (!inserted) out.errors.push_back("duplicate report for source '" + h.source_id + "'");
  }
  std::set<SourceId> orphans;
  for (const ContactEvent& e : events) {
    const auto it = by_source.find(e.source_id);
    if (it == by_source.end()) {
      orphans.insert(e.source_id);
    } else {
      it->second.events.push_back(e);
    }
  }
  for (const SourceId& s : orphans) {
    out.errors.push_back("events reference source '" + s + "' which has no report");
  }
  for (auto& [source, report] : by_source) {
    try {
      validate(report);
      out.items.push_back(std::move(report));
    } catch (const ValidationError& e) {
      for (const std::string& p : e.problems()) out.errors.push_back("report '" + source + "': " + p);
    }
  }
  return out;
}

std::string to_json_line(const DecascadeRecord& r) {
  const json j = {{"recipient_id", r.recipient_id},  {"outcome", std::string(to_string(r.outcome))},
                  {"old_total", r.old_total},        {"new_total", r.new_total},
                  {"cause_source_id", r.cause_source_id}, {"test_time", r.test_time}};
  return j.dump();
}

std::string to_json_line(const JournalEntry& entry) {
  const json j = {{"op", entry.op}, {"payload", json::parse(entry.payload)}, {"ts", entry.ts}};
  return j.dump();
}

std::vector<JournalEntry> read_journal(std::istream& in) {
  std::vector<JournalEntry> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = parse_object(line);
      reject_unknown_keys(j, {"op", "payload", "ts"});
      JournalEntry entry{require_string(j, "op"), {}, require_minutes(j, "ts")};
      if (entry.op != kIngest && entry.op != kDecascade) {
        throw DataError("unknown op '" + entry.op + "'");
      }
      const auto payload = j.find("payload");
      if (payload == j.end() || !payload->is_object()) throw DataError("'payload' must be an object");
      entry.payload = payload->dump();
      out.push_back(std::move(entry));
    } catch (const DataError& e) {
      throw DataError("journal line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

std::vector<RecipientId> EventStore::ingest_report(const SourceReport& report,
                                                   const RiskParams& params) {
  JournalEntry entry{std::string(kIngest), report_json(report).dump(), report.report_time};
  apply(entry, params);

  std::vector<RecipientId> touched;
  for (const RecipientId& r : recipients_of(report)) {
    if (states_.contains(r) && states_.at(r).ledger.find(report.source_id)) touched.push_back(r);
  }
  return touched;
}

std::vector<DecascadeRecord> EventStore::apply_negative_test(const NegativeTestEvent& negative,
                                                             const RiskParams& params) {
  if (!reports_.contains(negative.source_id)) {
    return {{"", Outcome::UnknownSource, 0.0, 0.0, negative.source_id, negative.test_time}};
  }
  const json payload = {{"source_id", negative.source_id}, {"test_time", negative.test_time}};
  apply({std::string(kDecascade), payload.dump(), negative.test_time}, params);
  return applied_tests_.at({negative.source_id, negative.test_time});
}

void EventStore::apply(const JournalEntry& entry, const RiskParams& params) {
  const json payload = parse_object(entry.payload);

  if (entry.op == kIngest) {
    const SourceReport report = report_from_json(payload);
    validate(report);
    if (reports_.contains(report.source_id)) {
      throw DataError("source '" + report.source_id + "' has already reported");
    }
    for (const RecipientId& recipient : recipients_of(report)) {
      SourceContribution c = source_contribution(report, recipient, params);
      if (c.event_risks.empty()) continue;
      auto [it, inserted] = states_.try_emplace(recipient);
      NotificationState& state = it->second;
      if (inserted) {
        state.recipient_id = recipient;
        state.ledger = RecipientLedger(recipient);
      }
      state.ledger.set(report.source_id, std::move(c));
      if (!advice_active(state, report.report_time) && should_notify(state.ledger, params)) {
        state.notify(report.report_time);
      }
    }
    reports_.emplace(report.source_id, report);
  } else if (entry.op == kDecascade) {
    reject_unknown_keys(payload, {"source_id", "test_time"});
    const NegativeTestEvent negative{require_string(payload, "source_id"),
                                     require_minutes(payload, "test_time")};
    if (!reports_.contains(negative.source_id)) {
      throw DataError("negative test for unknown source '" + negative.source_id + "'");
    }
    const std::pair key{negative.source_id, negative.test_time};
    if (!applied_tests_.contains(key)) {
      std::vector<NotificationState> states;
      states.reserve(states_.size());
      for (auto& [id, s] : states_) states.push_back(s);
      std::vector<DecascadeRecord> records = decascade(states, negative, params);
      if (records.size() == 1 && records.front().outcome == Outcome::UnknownSource) {
        records.clear();  // reported, but no windowed contributions anywhere
      } else {
        for (NotificationState& s : states) states_.at(s.recipient_id) = std::move(s);
      }
      applied_tests_.emplace(key, std::move(records));
    }
  } else {
    throw DataError("unknown journal op '" + entry.op + "'");
  }
  journal_.push_back(entry);
}

std::map<RecipientId, RecipientLedger> EventStore::ledgers() const {
  std::map<RecipientId, RecipientLedger> out;
  for (const auto& [id, state] : states_) out.emplace(id, state.ledger);
  return out;
}

EventStore EventStore::replay(std::span<const JournalEntry> journal, const RiskParams& params) {
  EventStore store;
  for (const JournalEntry& entry : journal) store.apply(entry, params);
  return store;
}

EventStore rebuild(const EventStore& store, const RiskParams& params) {
  return EventStore::replay(store.journal(), params);
}

bool consistent_with_journal(const EventStore& store, const RiskParams& params) {
  return rebuild(store, params) == store;
}

EventStore load_store(const std::filesystem::path& dir, const RiskParams& params) {
  const auto path = dir / kJournalFile;
  if (!std::filesystem::exists(path)) return {};
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open journal");
  const std::vector<JournalEntry> journal = read_journal(in);
  return EventStore::replay(journal, params);
}

void save_store(const EventStore& store, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::string text;
  for (const JournalEntry& entry : store.journal()) {
    text += to_json_line(entry);
    text += '\n';
  }
  write_file_atomic(dir / kJournalFile, text);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(tmp.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(tmp.string() + ": write failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace riskscore
