#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace decbit::metrics {

// One fixed-window measurement: the window that was pinned and the
// steady-state throughput (packets per unit time) and response time it
// produced.
struct SweepPoint {
  int window = 0;
  double throughput = 0.0;
  double response_time = 0.0;
};

struct Knee {
  int window = 0;
  double power = 0.0;
};

// Resources with their knee capacities and, per user, the indices of the
// resources the user's path crosses. demand_caps is either empty (every
// user has unbounded demand) or holds one cap per user.
struct ResourceGraph {
  std::vector<double> capacities;
  std::vector<std::vector<std::size_t>> user_paths;
  std::vector<std::optional<double>> demand_caps;
};

struct OptimalAllocation {
  std::vector<double> allocations;
  // Resource whose share froze the user; empty when the user's own demand
  // cap bound first.
  std::vector<std::optional<std::size_t>> bottleneck_of_user;
};

// (sum x)^2 / (n * sum x^2). Throws DomainError on an empty vector, a
// negative element, or an all-zero vector.
double fairness_index(std::span<const double> x);

// throughput^alpha / response_time.
double power(double throughput, double response_time, double alpha = 1.0);

double efficiency(double current_power, double knee_power);

// Window with the highest power; ties go to the smaller window.
Knee knee_from_sweep(std::span<const SweepPoint> points, double alpha = 1.0);

// Progressive water-filling over the resource graph.
OptimalAllocation max_min_fair_allocation(const ResourceGraph& graph);

// fairness_index of actual[i] / optimal[i].
double global_fairness(std::span<const double> actual,
                       const OptimalAllocation& optimal);

}  // namespace decbit::metrics
