#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "decbit/metrics.hpp"
#include "decbit/trace.hpp"

namespace oracle {

// Water level t with sum(min(d_i, t)) == capacity_factor * sum(d_i), found by
// bisection. Only meaningful for capacity_factor < 1.
inline double water_level(const std::vector<double>& demands, double capacity_factor) {
  double total = std::accumulate(demands.begin(), demands.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double target = capacity_factor * total;
  double lo = 0.0;
  double hi = *std::max_element(demands.begin(), demands.end());
  for (int i = 0; i < 200 && lo < hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double filled = 0.0;
    for (double d : demands) filled += std::min(d, mid);
    (filled < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Exhaustive lexicographic max-min over allocations that are multiples of
// `step`. Every user but the last is enumerated; the last takes the largest
// feasible grid value, since raising one entry never lowers the sorted vector.
inline std::vector<double> grid_max_min(const decbit::metrics::ResourceGraph& g, double step) {
  const std::size_t n = g.user_paths.size();
  std::vector<double> best_sorted;
  std::vector<double> best;
  std::vector<double> load(g.capacities.size(), 0.0);
  std::vector<double> cur(n, 0.0);
  const double eps = 1e-9;

  auto headroom = [&](std::size_t u) {
    double h = 1e300;
    for (std::size_t r : g.user_paths[u]) h = std::min(h, g.capacities[r] - load[r]);
    return h;
  };
  auto consider = [&] {
    auto s = sorted(cur);
    if (best_sorted.empty() || std::lexicographical_compare(best_sorted.begin(), best_sorted.end(),
                                                            s.begin(), s.end())) {
      best_sorted = s;
      best = cur;
    }
  };
  auto rec = [&](auto&& self, std::size_t u) -> void {
    if (u + 1 == n) {
      double k = std::floor((headroom(u) + eps) / step);
      cur[u] = std::max(0.0, k) * step;
      consider();
      return;
    }
    double h = headroom(u);
    for (int k = 0; k * step <= h + eps; ++k) {
      cur[u] = k * step;
      for (std::size_t r : g.user_paths[u]) load[r] += cur[u];
      self(self, u + 1);
      for (std::size_t r : g.user_paths[u]) load[r] -= cur[u];
    }
  };
  if (n > 0) rec(rec, 0);
  return best;
}

// Queue-length step function rebuilt from arrive/depart trace rows of one
// router, kept as explicit segments since the start of the previous cycle.
class QueueIntegrator {
 public:
  struct Segment {
    double begin;
    double end;
    int q;
  };

  void observe(const decbit::TraceRecord& r) {
    if (r.time > last_) segments_.push_back({last_, r.time, q_});
    last_ = r.time;
    bool regenerates = q_ == 0 && r.qlen == 1;
    q_ = r.qlen;
    if (regenerates) {
      // Drop everything before the cycle that just ended.
      std::erase_if(segments_, [&](const Segment& s) { return s.end <= cycle_begin_; });
      prev_cycle_begin_ = cycle_begin_;
      cycle_begin_ = r.time;
    }
  }

  // Integral of q over [prev_cycle_begin, last event].
  double two_cycle_area() const {
    double a = 0.0;
    for (const auto& s : segments_) {
      if (s.begin >= prev_cycle_begin_) a += s.q * (s.end - s.begin);
    }
    return a;
  }
  double prev_cycle_begin() const { return prev_cycle_begin_; }
  int queue_length() const { return q_; }

 private:
  std::vector<Segment> segments_;
  double last_ = 0.0;
  double cycle_begin_ = 0.0;
  double prev_cycle_begin_ = 0.0;
  int q_ = 0;
};

}  // namespace oracle
