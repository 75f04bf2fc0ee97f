#include "fpgate/telemetry.hpp"

#include <fstream>

#include "fpgate/errors.hpp"

// httplib pulls in sockets/threads; keep it out of the public headers.
#include <httplib.h>

namespace fpgate {

std::string Alert::to_line() const {
  std::string d = detail;
  for (char& c : d)
    if (c == '|' || c == '\n' || c == '\r') c = '/';
  return "ALERT|" + std::to_string(ts) + "|" + subject + "|" +
         std::to_string(count) + "|" + d;
}

std::optional<Alert> AlertMonitor::observe(const EventRecord& e,
                                           const AlertRule& rule) {
  Streak& st = streaks_[e.subject];
  if (st.has_seen && e.ts < st.last_ts)
    throw OutOfOrderEvent("event at ts " + std::to_string(e.ts) +
                          " before ts " + std::to_string(st.last_ts) +
                          " for subject " + e.subject);
  st.last_ts = e.ts;
  st.has_seen = true;

  if (e.kind == EventKind::VERIFY_ACCEPT) {
    st.count = 0;
    return std::nullopt;
  }
  if (e.kind != EventKind::VERIFY_REJECT) return std::nullopt;

  // Window expiry: the streak is anchored at its first reject.
  if (st.count > 0 && e.ts - st.start_ts > rule.window_seconds) st.count = 0;
  if (st.count == 0) st.start_ts = e.ts;
  ++st.count;

  if (st.count < rule.max_consecutive_rejects) return std::nullopt;
  st.count = 0;  // firing restarts the streak

  Alert a;
  a.ts = e.ts;
  a.subject = e.subject;
  a.count = rule.max_consecutive_rejects;
  a.detail = "consecutive verify rejects";
  return a;
}

namespace {

SinkResult dispatch_file(const Alert& a, const Sink& sink) {
  SinkResult res{sink, false, {}};
  std::ofstream out(sink.target, std::ios::binary | std::ios::app);
  if (!out) {
    res.error = "SinkUnreachable: cannot open " + sink.target;
    return res;
  }
  out << a.to_line() << "\n";
  out.flush();
  if (!out) {
    res.error = "SinkUnreachable: short write to " + sink.target;
    return res;
  }
  res.ok = true;
  return res;
}

SinkResult dispatch_http(const Alert& a, const Sink& sink) {
  SinkResult res{sink, false, {}};

  // Accept http://host[:port][/path]; anything else is unreachable.
  const std::string& url = sink.target;
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    res.error = "SinkUnreachable: unsupported url " + url;
    return res;
  }
  std::size_t host_start = scheme.size();
  std::size_t path_start = url.find('/', host_start);
  std::string host_port = path_start == std::string::npos
                              ? url.substr(host_start)
                              : url.substr(host_start, path_start - host_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (host_port.empty()) {
    res.error = "SinkUnreachable: empty host in " + url;
    return res;
  }

  httplib::Client cli(scheme + host_port);
  cli.set_connection_timeout(2, 0);
  cli.set_read_timeout(2, 0);
  auto reply = cli.Post(path, a.to_line(), "text/plain");
  if (!reply) {
    res.error = "SinkUnreachable: " + to_string(reply.error()) + " for " + url;
    return res;
  }
  if (reply->status < 200 || reply->status >= 300) {
    res.error = "SinkUnreachable: http status " + std::to_string(reply->status);
    return res;
  }
  res.ok = true;
  return res;
}

}  // namespace

std::vector<SinkResult> dispatch(const Alert& a, const std::vector<Sink>& sinks) {
  std::vector<SinkResult> results;
  results.reserve(sinks.size());
  for (const Sink& s : sinks) {
    if (s.target.empty()) {
      results.push_back({s, false, "SinkUnreachable: empty target"});
      continue;
    }
    results.push_back(s.kind == SinkKind::FILE ? dispatch_file(a, s)
                                               : dispatch_http(a, s));
  }
  return results;
}

}  // namespace fpgate
