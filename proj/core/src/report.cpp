#include "decbit/report.hpp"

#include <cstdio>
#include <ostream>

#include "decbit/errors.hpp"

namespace decbit {

double knee_capacity(const ServerSpec& router) {
  double rate = 1.0 / router.mean_service_time;
  return router.distribution == ServiceDistribution::kDeterministic ? rate : rate / 2.0;
}

double knee_power(const ServerSpec& router) {
  double rate = 1.0 / router.mean_service_time;
  return router.distribution == ServiceDistribution::kDeterministic ? rate * rate
                                                                    : rate * rate / 4.0;
}

MetricsReport build_report(const Scenario& scenario, const std::vector<UserStats>& users,
                           const std::vector<RouterStats>& routers, double measure_begin,
                           double measure_end) {
  MetricsReport rep;
  rep.scenario = scenario.name;
  rep.measure_begin = measure_begin;
  rep.measure_end = measure_end;

  for (std::size_t k = 0; k < scenario.routers.size(); ++k) {
    const auto& spec = scenario.routers[k];
    const auto& s = routers.at(k);
    RouterReport r;
    r.name = spec.name;
    r.throughput = s.throughput;
    r.utilization = s.utilization;
    r.mean_queue_length = s.mean_queue_length;
    r.response_time = s.mean_response_time;
    r.power = s.mean_response_time > 0.0
                  ? metrics::power(s.throughput, s.mean_response_time)
                  : 0.0;
    r.knee_capacity = knee_capacity(spec);
    r.knee_power = knee_power(spec);
    r.efficiency = metrics::efficiency(r.power, r.knee_power);
    rep.routers.push_back(r);
  }

  std::vector<std::size_t> active;
  for (std::size_t u = 0; u < scenario.users.size(); ++u) {
    const auto& s = users.at(u);
    UserReport r;
    r.name = scenario.users[u].name;
    r.active = s.active_time > 0.0;
    r.throughput = s.throughput;
    r.response_time = s.mean_response_time;
    rep.users.push_back(r);
    if (r.active) active.push_back(u);
  }

  if (!active.empty()) {
    metrics::ResourceGraph graph;
    for (const auto& spec : scenario.routers) graph.capacities.push_back(knee_capacity(spec));
    for (std::size_t u : active) {
      std::vector<std::size_t> path;
      for (const auto& hop : scenario.users[u].path) path.push_back(*scenario.router_index(hop));
      graph.user_paths.push_back(std::move(path));
    }
    auto optimal = metrics::max_min_fair_allocation(graph);
    std::vector<double> actual;
    for (std::size_t i = 0; i < active.size(); ++i) {
      rep.users[active[i]].optimal_throughput = optimal.allocations[i];
      actual.push_back(rep.users[active[i]].throughput);
    }
    bool any_traffic = false;
    for (double a : actual) any_traffic = any_traffic || a > 0.0;
    if (any_traffic) {
      rep.fairness = metrics::fairness_index(actual);
      rep.global_fairness = metrics::global_fairness(actual, optimal);
    }
  }

  if (!rep.routers.empty() && measure_end > measure_begin) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < rep.routers.size(); ++k) {
      if (rep.routers[k].utilization > rep.routers[best].utilization) best = k;
    }
    if (rep.routers[best].utilization > 0.0) {
      rep.bottleneck = best;
      rep.global_efficiency = rep.routers[best].efficiency;
    }
  }
  return rep;
}

MetricsReport report_from_trace(const Scenario& scenario, const ParsedTrace& trace) {
  std::vector<int> user_map;
  for (const auto& name : trace.user_names) {
    auto idx = scenario.user_index(name);
    if (!idx) throw ConfigError("trace names user '" + name + "' not in the scenario");
    user_map.push_back(static_cast<int>(*idx));
  }
  std::vector<int> router_map;
  for (const auto& name : trace.router_names) {
    auto idx = scenario.router_index(name);
    if (!idx) throw ConfigError("trace names router '" + name + "' not in the scenario");
    router_map.push_back(static_cast<int>(*idx));
  }
  if (!trace.header.scenario.empty() && !scenario.name.empty() &&
      trace.header.scenario != scenario.name) {
    throw ConfigError("trace was produced by scenario '" + trace.header.scenario +
                      "', not '" + scenario.name + "'");
  }

  const double end = trace.header.end_time;
  const double begin = scenario.run.warmup_fraction * scenario.run.end_time;
  StatsCollector stats(scenario.users.size(), scenario.routers.size(), begin);
  for (TraceRecord r : trace.records) {
    if (r.user >= 0) r.user = user_map[static_cast<std::size_t>(r.user)];
    if (r.router >= 0) r.router = router_map[static_cast<std::size_t>(r.router)];
    stats.observe(r);
  }
  stats.finish(std::max(end, begin));
  return build_report(scenario, stats.users(), stats.routers(), begin, std::max(end, begin));
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_report_text(std::ostream& out, const MetricsReport& rep) {
  out << "scenario: " << (rep.scenario.empty() ? "(unnamed)" : rep.scenario) << '\n';
  out << "measurement interval: [" << fmt(rep.measure_begin) << ", " << fmt(rep.measure_end)
      << "]\n\n";
  out << "users:\n";
  for (const auto& u : rep.users) {
    out << "  " << u.name << ": throughput " << fmt(u.throughput) << " pkt/t, response time "
        << fmt(u.response_time) << ", optimal throughput " << fmt(u.optimal_throughput)
        << (u.active ? "" : " (inactive)") << '\n';
  }
  out << "\nrouters:\n";
  for (const auto& r : rep.routers) {
    out << "  " << r.name << ": throughput " << fmt(r.throughput) << ", utilization "
        << fmt(r.utilization) << ", mean queue " << fmt(r.mean_queue_length)
        << ", response time " << fmt(r.response_time) << ", power " << fmt(r.power)
        << ", knee power " << fmt(r.knee_power) << ", efficiency " << fmt(r.efficiency)
        << '\n';
  }
  out << '\n';
  auto opt = [&](const char* label, const std::optional<double>& v) {
    out << label << ": " << (v ? fmt(*v) : std::string("n/a")) << '\n';
  };
  opt("fairness index", rep.fairness);
  opt("global fairness", rep.global_fairness);
  out << "bottleneck: " << (rep.bottleneck ? rep.routers[*rep.bottleneck].name : "n/a") << '\n';
  opt("global efficiency", rep.global_efficiency);
}

void write_report_csv(std::ostream& out, const MetricsReport& rep) {
  out << "kind,name,metric,value\n";
  auto row = [&](const char* kind, const std::string& name, const char* metric, double v) {
    out << kind << ',' << name << ',' << metric << ',' << format_number(v) << '\n';
  };
  row("run", rep.scenario, "measure_begin", rep.measure_begin);
  row("run", rep.scenario, "measure_end", rep.measure_end);
  for (const auto& u : rep.users) {
    row("user", u.name, "throughput", u.throughput);
    row("user", u.name, "response_time", u.response_time);
    row("user", u.name, "optimal_throughput", u.optimal_throughput);
  }
  for (const auto& r : rep.routers) {
    row("router", r.name, "throughput", r.throughput);
    row("router", r.name, "utilization", r.utilization);
    row("router", r.name, "mean_queue_length", r.mean_queue_length);
    row("router", r.name, "response_time", r.response_time);
    row("router", r.name, "power", r.power);
    row("router", r.name, "knee_power", r.knee_power);
    row("router", r.name, "efficiency", r.efficiency);
  }
  if (rep.fairness) row("global", "", "fairness", *rep.fairness);
  if (rep.global_fairness) row("global", "", "global_fairness", *rep.global_fairness);
  if (rep.bottleneck) {
    out << "global,,bottleneck," << rep.routers[*rep.bottleneck].name << '\n';
  }
  if (rep.global_efficiency) row("global", "", "global_efficiency", *rep.global_efficiency);
}

}  // namespace decbit
