#include "fpgate/store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fpgate/errors.hpp"

namespace fs = std::filesystem;

namespace fpgate {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::ENROLL: return "ENROLL";
    case EventKind::VERIFY_ACCEPT: return "VERIFY_ACCEPT";
    case EventKind::VERIFY_REJECT: return "VERIFY_REJECT";
    case EventKind::QUALITY_REJECT: return "QUALITY_REJECT";
    case EventKind::ALERT: return "ALERT";
  }
  return "?";
}

std::optional<EventKind> event_kind_from_name(const std::string& name) {
  if (name == "ENROLL") return EventKind::ENROLL;
  if (name == "VERIFY_ACCEPT") return EventKind::VERIFY_ACCEPT;
  if (name == "VERIFY_REJECT") return EventKind::VERIFY_REJECT;
  if (name == "QUALITY_REJECT") return EventKind::QUALITY_REJECT;
  if (name == "ALERT") return EventKind::ALERT;
  return std::nullopt;
}

namespace {

std::string sanitize(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (c == '|' || c == '\n' || c == '\r') c = '/';
  return out;
}

std::string score_field(const std::optional<double>& score) {
  if (!score) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", *score);
  return buf;
}

}  // namespace

std::string EventRecord::to_line() const {
  return std::to_string(ts) + "|" + event_kind_name(kind) + "|" +
         sanitize(subject) + "|" + score_field(score) + "|" + sanitize(detail);
}

EventRecord EventRecord::from_line(const std::string& line) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t next = line.find('|', pos);
    if (next == std::string::npos)
      throw CorruptLayout("event line has too few fields: " + line);
    parts.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  parts.push_back(line.substr(pos));

  EventRecord e;
  try {
    e.ts = std::stoll(parts[0]);
  } catch (const std::exception&) {
    throw CorruptLayout("bad event timestamp: " + parts[0]);
  }
  auto kind = event_kind_from_name(parts[1]);
  if (!kind) throw CorruptLayout("unknown event kind: " + parts[1]);
  e.kind = *kind;
  e.subject = parts[2];
  if (parts[3] != "-") {
    try {
      e.score = std::stod(parts[3]);
    } catch (const std::exception&) {
      throw CorruptLayout("bad event score: " + parts[3]);
    }
  }
  e.detail = parts[4];
  return e;
}

StoreHandle StoreHandle::open(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "templates", ec);
  if (ec) throw IoFailure("cannot create store layout at " + dir.string());

  if (!fs::exists(dir / "events.log")) {
    std::ofstream out(dir / "events.log", std::ios::app);
    if (!out) throw IoFailure("cannot create events.log in " + dir.string());
  }

  StoreHandle h(dir);
  // Validate: every present template file must parse.
  for (const auto& entry : fs::directory_iterator(dir / "templates")) {
    if (entry.path().extension() != ".fpt") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      template_parse(buf.str());
    } catch (const CorruptLayout& e) {
      throw CorruptLayout(entry.path().filename().string() + ": " + e.what());
    }
  }
  return h;
}

fs::path StoreHandle::template_path(const std::string& id) const {
  return dir_ / "templates" / (id + ".fpt");
}

fs::path StoreHandle::events_path() const { return dir_ / "events.log"; }

void StoreHandle::enroll(const Template& t, bool overwrite) {
  if (!valid_template_id(t.id))
    throw CorruptLayout("invalid template id '" + t.id + "'");
  fs::path path = template_path(t.id);
  if (!overwrite && fs::exists(path))
    throw DuplicateId("template '" + t.id + "' already enrolled");

  std::string body = template_serialize(t);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path.string());
  out << body;
  out.flush();
  if (!out) throw IoFailure("short write to " + path.string());

  EventRecord e;
  e.ts = t.created;
  e.kind = EventKind::ENROLL;
  e.subject = t.id;
  e.detail = "minutiae=" + std::to_string(t.structural.minutiae.size());
  log_event(e);
}

Template StoreHandle::get(const std::string& id) const {
  fs::path path = template_path(id);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnknownId("no template '" + id + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return template_parse(buf.str());
}

std::vector<std::string> StoreHandle::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir_ / "templates")) {
    if (entry.path().extension() != ".fpt") continue;
    ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void StoreHandle::log_event(const EventRecord& e) {
  std::ofstream out(events_path(), std::ios::binary | std::ios::app);
  if (!out) throw IoFailure("cannot append to events.log");
  out << e.to_line() << "\n";
  out.flush();
  if (!out) throw IoFailure("short write to events.log");
}

std::vector<EventRecord> StoreHandle::read_events() const {
  std::ifstream in(events_path(), std::ios::binary);
  if (!in) throw IoFailure("cannot read events.log");
  std::vector<EventRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(EventRecord::from_line(line));
  }
  return out;
}

StoreHandle::Stats StoreHandle::stats() const {
  Stats st;
  std::int64_t accepts = 0, rejects = 0;
  double sum = 0.0, sum2 = 0.0;
  for (const EventRecord& e : read_events()) {
    st.counts[event_kind_name(e.kind)] += 1;
    if (e.kind == EventKind::VERIFY_ACCEPT) ++accepts;
    if (e.kind == EventKind::VERIFY_REJECT) ++rejects;
    if (e.score) {
      sum += *e.score;
      sum2 += *e.score * *e.score;
      ++st.scored_events;
    }
  }
  if (accepts + rejects > 0)
    st.accept_rate = static_cast<double>(accepts) / static_cast<double>(accepts + rejects);
  if (st.scored_events > 0) {
    double n = static_cast<double>(st.scored_events);
    st.score_mean = sum / n;
    double var = sum2 / n - st.score_mean * st.score_mean;
    st.score_std = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return st;
}

}  // namespace fpgate
