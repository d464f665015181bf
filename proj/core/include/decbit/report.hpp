#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "decbit/metrics.hpp"
#include "decbit/scenario.hpp"
#include "decbit/stats.hpp"
#include "decbit/trace.hpp"

namespace decbit {

struct UserReport {
  std::string name;
  bool active = false;
  double throughput = 0.0;
  double response_time = 0.0;
  // Max-min optimal throughput; 0 for users that never ran.
  double optimal_throughput = 0.0;
};

struct RouterReport {
  std::string name;
  double throughput = 0.0;
  double utilization = 0.0;
  double mean_queue_length = 0.0;
  double response_time = 0.0;
  double power = 0.0;
  double knee_capacity = 0.0;
  double knee_power = 0.0;
  double efficiency = 0.0;
};

struct MetricsReport {
  std::string scenario;
  double measure_begin = 0.0;
  double measure_end = 0.0;
  std::vector<UserReport> users;
  std::vector<RouterReport> routers;
  // Fairness index of raw active-user throughputs.
  std::optional<double> fairness;
  // Fairness index of throughput / optimal throughput over active users.
  std::optional<double> global_fairness;
  // Router with the highest utilization, and its efficiency.
  std::optional<std::size_t> bottleneck;
  std::optional<double> global_efficiency;
};

// Knee throughput of a router: the service rate for deterministic service,
// half of it for exponential service (M/M/1 power peaks at utilization 0.5).
double knee_capacity(const ServerSpec& router);
// Resource power at the knee.
double knee_power(const ServerSpec& router);

MetricsReport build_report(const Scenario& scenario, const std::vector<UserStats>& users,
                           const std::vector<RouterStats>& routers, double measure_begin,
                           double measure_end);

// Recompute a report from a trace written by `decbit run` on the same
// scenario. Throws ConfigError when the trace names users or routers the
// scenario does not define.
MetricsReport report_from_trace(const Scenario& scenario, const ParsedTrace& trace);

void write_report_text(std::ostream& out, const MetricsReport& report);
// Long-form CSV: kind,name,metric,value
void write_report_csv(std::ostream& out, const MetricsReport& report);

}  // namespace decbit
