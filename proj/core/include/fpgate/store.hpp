#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpgate/template.hpp"

namespace fpgate {

enum class EventKind { ENROLL, VERIFY_ACCEPT, VERIFY_REJECT, QUALITY_REJECT, ALERT };

const char* event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from_name(const std::string& name);

/// One line of events.log: ts|kind|subject|score|detail.
struct EventRecord {
  std::int64_t ts = 0;
  EventKind kind = EventKind::ENROLL;
  std::string subject = "-";
  std::optional<double> score;  // serialized at 6 decimals, or "-"
  std::string detail;           // pipe/newline characters are sanitized

  std::string to_line() const;
  static EventRecord from_line(const std::string& line);  // throws CorruptLayout
};

/// Store layout: <dir>/templates/<id>.fpt plus <dir>/events.log.
/// Single writer per directory; concurrent readers are fine.
class StoreHandle {
 public:
  // Creates or validates the layout. Throws CorruptLayout when an
  // unparseable template file is present, IoFailure on filesystem errors.
  static StoreHandle open(const std::filesystem::path& dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path template_path(const std::string& id) const;
  std::filesystem::path events_path() const;

  // Serializes the template and appends an ENROLL event. Refuses an
  // existing id unless overwrite. Throws DuplicateId, IoFailure.
  void enroll(const Template& t, bool overwrite = false);

  Template get(const std::string& id) const;  // throws UnknownId
  std::vector<std::string> list() const;      // lexicographic
  void log_event(const EventRecord& e);       // appends one line
  std::vector<EventRecord> read_events() const;

  struct Stats {
    std::map<std::string, std::int64_t> counts;  // per event kind name
    double accept_rate = 0.0;  // accepts / (accepts + rejects), 0 if none
    double score_mean = 0.0;   // over events with a numeric score
    double score_std = 0.0;    // population std-dev
    std::int64_t scored_events = 0;
  };
  Stats stats() const;

 private:
  explicit StoreHandle(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::filesystem::path dir_;
};

}  // namespace fpgate
