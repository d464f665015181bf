#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "decbit/trace.hpp"

namespace decbit {

struct UserStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;       // within the measurement window
  double active_time = 0.0;          // overlap of the user's life with the window
  double throughput = 0.0;           // packets per unit time
  double mean_response_time = 0.0;   // send to destination accept
};

struct RouterStats {
  std::uint64_t departures = 0;      // within the measurement window
  double throughput = 0.0;
  double utilization = 0.0;
  double mean_queue_length = 0.0;    // time average, includes the one in service
  double mean_response_time = 0.0;   // arrival to departure
};

// Derives steady-state statistics from a stream of trace records. Only the
// interval [measure_begin, end] counts; the queue-length step function is
// rebuilt from the records themselves, independent of router bookkeeping.
class StatsCollector {
 public:
  StatsCollector(std::size_t n_users, std::size_t n_routers, double measure_begin);

  void observe(const TraceRecord& r);
  void finish(double end_time);

  double measure_begin() const { return begin_; }
  double measure_end() const { return end_; }
  const std::vector<UserStats>& users() const { return users_; }
  const std::vector<RouterStats>& routers() const { return routers_; }

 private:
  struct RouterTrack {
    int qlen = 0;
    double last_change = 0.0;
    double area = 0.0;
    double busy = 0.0;
    double sojourn_sum = 0.0;
    std::map<std::pair<int, std::int64_t>, double> arrival_of;
  };
  struct UserTrack {
    double start = -1.0;
    double response_sum = 0.0;
    std::map<std::int64_t, double> send_of;
  };

  void advance(RouterTrack& t, double now);

  double begin_;
  double end_ = 0.0;
  std::vector<UserStats> users_;
  std::vector<RouterStats> routers_;
  std::vector<UserTrack> user_tracks_;
  std::vector<RouterTrack> router_tracks_;
};

}  // namespace decbit
