#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fpgate/store.hpp"

namespace fpgate {

struct AlertRule {
  int max_consecutive_rejects = 3;
  std::int64_t window_seconds = 60;
};

struct Alert {
  std::int64_t ts = 0;
  std::string subject;
  int count = 0;
  std::string detail;

  // Wire format: ALERT|<ts>|<subject>|<count>|<detail>
  std::string to_line() const;
};

/// Consecutive-reject tracker. Events must arrive in nondecreasing ts
/// order per subject (OutOfOrderEvent otherwise). A streak is anchored at
/// its first reject; an accept or window expiry resets it, and firing an
/// alert restarts the count.
class AlertMonitor {
 public:
  std::optional<Alert> observe(const EventRecord& e, const AlertRule& rule);

 private:
  struct Streak {
    int count = 0;
    std::int64_t start_ts = 0;
    std::int64_t last_ts = 0;
    bool has_seen = false;
  };
  std::map<std::string, Streak> streaks_;
};

enum class SinkKind { FILE, HTTP_POST };

struct Sink {
  SinkKind kind = SinkKind::FILE;
  std::string target;  // path or http:// URL
};

struct SinkResult {
  Sink sink;
  bool ok = false;
  std::string error;  // "SinkUnreachable: ..." on failure
};

// Appends the alert line to FILE sinks and posts it as a text/plain body
// to HTTP_POST sinks. Per-sink failures are collected, never thrown, and
// never abort the other sinks.
std::vector<SinkResult> dispatch(const Alert& a, const std::vector<Sink>& sinks);

}  // namespace fpgate
