#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decbit {

enum class TraceEvent {
  kStart,     // user becomes active
  kSend,      // source emits a packet
  kArrive,    // packet joins a router queue
  kDepart,    // packet leaves a router server
  kDeliver,   // destination accepts a packet
  kAck,       // source learns the packet's bit
  kIncrease,  // window adjusted up
  kDecrease,  // window adjusted down
};

std::string_view to_string(TraceEvent e);
std::optional<TraceEvent> trace_event_from_string(std::string_view s);

// One row per observable event. User-side fields (w, w_used) snapshot the
// source after the event; router-side fields (router, qlen, avg_qlen) are
// set only on arrive/depart rows.
struct TraceRecord {
  double time = 0.0;
  int user = -1;
  TraceEvent event = TraceEvent::kStart;
  double w = 0.0;
  int w_used = 0;
  std::int64_t seq = -1;
  bool bit = false;
  int router = -1;
  int qlen = -1;
  double avg_qlen = 0.0;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

inline constexpr int kTraceFormatVersion = 1;
inline constexpr std::string_view kTraceColumns =
    "time,user,event,w,w_used,seq,bit,router,qlen,avg_qlen";

struct TraceHeader {
  int version = kTraceFormatVersion;
  std::string scenario;
  std::string rng = "mt19937_64";
  std::uint64_t seed = 0;
  double end_time = 0.0;
};

// Users and routers are written by name; `user_names` / `router_names` map
// the indices stored in each record.
void write_trace_csv(std::ostream& out, const TraceHeader& header,
                     const std::vector<std::string>& user_names,
                     const std::vector<std::string>& router_names,
                     const std::vector<TraceRecord>& records);

struct ParsedTrace {
  TraceHeader header;
  std::vector<std::string> user_names;    // in order of first appearance
  std::vector<std::string> router_names;  // in order of first appearance
  std::vector<TraceRecord> records;
};

// Throws ConfigError on malformed input (with line numbers).
ParsedTrace read_trace_csv(std::istream& in);

// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

}  // namespace decbit
