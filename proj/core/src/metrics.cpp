#include "decbit/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "decbit/errors.hpp"

namespace decbit::metrics {

double fairness_index(std::span<const double> x) {
  if (x.empty()) {
    throw DomainError("fairness_index: empty allocation vector");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : x) {
    if (!(v >= 0.0)) {
      throw DomainError("fairness_index: allocations must be non-negative");
    }
    sum += v;
    sum_sq += v * v;
  }
  if (sum_sq == 0.0) {
    throw DomainError("fairness_index: undefined for an all-zero vector");
  }
  double n = static_cast<double>(x.size());
  return (sum * sum) / (n * sum_sq);
}

double power(double throughput, double response_time, double alpha) {
  if (!(response_time > 0.0)) {
    throw DomainError("power: response time must be positive");
  }
  if (!(throughput >= 0.0)) {
    throw DomainError("power: throughput must be non-negative");
  }
  if (!(alpha > 0.0)) {
    throw DomainError("power: alpha must be positive");
  }
  double t = alpha == 1.0 ? throughput : std::pow(throughput, alpha);
  return t / response_time;
}

double efficiency(double current_power, double knee_power) {
  if (!(knee_power > 0.0)) {
    throw DomainError("efficiency: knee power must be positive");
  }
  if (!(current_power >= 0.0)) {
    throw DomainError("efficiency: power must be non-negative");
  }
  return current_power / knee_power;
}

Knee knee_from_sweep(std::span<const SweepPoint> points, double alpha) {
  if (points.empty()) {
    throw DomainError("knee_from_sweep: empty sweep");
  }
  Knee best{points.front().window,
            power(points.front().throughput, points.front().response_time, alpha)};
  for (const auto& p : points.subspan(1)) {
    double pw = power(p.throughput, p.response_time, alpha);
    if (pw > best.power || (pw == best.power && p.window < best.window)) {
      best = {p.window, pw};
    }
  }
  return best;
}

OptimalAllocation max_min_fair_allocation(const ResourceGraph& graph) {
  const std::size_t n_res = graph.capacities.size();
  const std::size_t n_users = graph.user_paths.size();
  for (double c : graph.capacities) {
    if (!(c > 0.0)) {
      throw ConfigError("max_min_fair_allocation: capacities must be positive");
    }
  }
  if (!graph.demand_caps.empty() && graph.demand_caps.size() != n_users) {
    throw ConfigError("max_min_fair_allocation: one demand cap per user required");
  }
  for (std::size_t u = 0; u < n_users; ++u) {
    if (graph.user_paths[u].empty()) {
      throw ConfigError("max_min_fair_allocation: user " + std::to_string(u) +
                        " has an empty path");
    }
    for (std::size_t r : graph.user_paths[u]) {
      if (r >= n_res) {
        throw ConfigError("max_min_fair_allocation: user " + std::to_string(u) +
                          " references unknown resource " + std::to_string(r));
      }
    }
  }

  OptimalAllocation out;
  out.allocations.assign(n_users, 0.0);
  out.bottleneck_of_user.assign(n_users, std::nullopt);

  std::vector<double> remaining = graph.capacities;
  std::vector<bool> frozen(n_users, false);
  std::size_t n_frozen = 0;
  auto cap_of = [&](std::size_t u) -> std::optional<double> {
    return graph.demand_caps.empty() ? std::nullopt : graph.demand_caps[u];
  };

  while (n_frozen < n_users) {
    // Unsatisfied users crossing each resource.
    std::vector<std::size_t> active(n_res, 0);
    for (std::size_t u = 0; u < n_users; ++u) {
      if (frozen[u]) continue;
      for (std::size_t r : graph.user_paths[u]) ++active[r];
    }

    double level = std::numeric_limits<double>::infinity();
    std::size_t tight = n_res;
    for (std::size_t r = 0; r < n_res; ++r) {
      if (active[r] == 0) continue;
      double share = remaining[r] / static_cast<double>(active[r]);
      if (share < level) {
        level = share;
        tight = r;
      }
    }

    // A demand cap below the resource level satisfies its user first.
    double min_cap = std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < n_users; ++u) {
      if (frozen[u]) continue;
      if (auto c = cap_of(u); c && *c - out.allocations[u] < min_cap) {
        min_cap = *c - out.allocations[u];
      }
    }

    double increment = std::min(level, min_cap);
    if (increment < 0.0) increment = 0.0;
    for (std::size_t u = 0; u < n_users; ++u) {
      if (frozen[u]) continue;
      out.allocations[u] += increment;
      for (std::size_t r : graph.user_paths[u]) remaining[r] -= increment;
    }

    for (std::size_t u = 0; u < n_users; ++u) {
      if (frozen[u]) continue;
      auto c = cap_of(u);
      if (c && out.allocations[u] >= *c) {
        out.allocations[u] = *c;
        frozen[u] = true;
        ++n_frozen;
        continue;
      }
      if (min_cap < level) continue;
      for (std::size_t r : graph.user_paths[u]) {
        // The tight resource, and any other that hit the same level.
        if (r == tight || remaining[r] <= 1e-12 * graph.capacities[r]) {
          frozen[u] = true;
          out.bottleneck_of_user[u] = r;
          ++n_frozen;
          break;
        }
      }
    }
  }
  return out;
}

double global_fairness(std::span<const double> actual,
                       const OptimalAllocation& optimal) {
  if (actual.size() != optimal.allocations.size()) {
    throw DomainError("global_fairness: allocation vectors differ in length");
  }
  std::vector<double> ratios(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    double opt = optimal.allocations[i];
    if (!(opt > 0.0)) {
      throw DomainError("global_fairness: optimal allocation must be positive");
    }
    ratios[i] = actual[i] / opt;
  }
  return fairness_index(ratios);
}

}  // namespace decbit::metrics
