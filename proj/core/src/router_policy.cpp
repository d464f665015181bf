#include "decbit/router_policy.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>

#include "decbit/errors.hpp"

namespace decbit {

PacketCountTable::PacketCountTable(std::size_t hashed_size)
    : slots_(hashed_size, 0.0) {}

std::size_t PacketCountTable::slot_of(const FlowId& flow) const {
  return slots_.empty() ? 0 : FlowIdHash{}(flow) % slots_.size();
}

void PacketCountTable::increment(const FlowId& flow) {
  if (hashed()) {
    slots_[slot_of(flow)] += 1.0;
  } else {
    by_flow_[flow] += 1.0;
  }
  total_ += 1.0;
}

void PacketCountTable::clear() {
  by_flow_.clear();
  std::fill(slots_.begin(), slots_.end(), 0.0);
  total_ = 0.0;
}

double PacketCountTable::count(const FlowId& flow) const {
  if (hashed()) return slots_[slot_of(flow)];
  auto it = by_flow_.find(flow);
  return it == by_flow_.end() ? 0.0 : it->second;
}

double fair_share_of(std::span<const double> demands, double capacity_factor) {
  double total = 0.0;
  for (double d : demands) total += d;
  if (total <= 0.0 || demands.empty()) return 0.0;

  const double capacity = capacity_factor * total;
  double num_not_allocated = static_cast<double>(demands.size());
  double sum_allocation = 0.0;
  double old_sum_allocation = -1.0;
  double fair_share = -1.0;
  while (sum_allocation > old_sum_allocation) {
    double old_fair_share = fair_share;
    old_sum_allocation = sum_allocation;
    fair_share = (capacity - sum_allocation) / num_not_allocated;
    for (double demand : demands) {
      if (demand <= fair_share && demand > old_fair_share) {
        num_not_allocated -= 1.0;
        sum_allocation += demand;
      }
    }
    // Only reachable when every demand fits, i.e. capacity_factor >= 1.
    if (num_not_allocated <= 0.0) break;
  }
  return fair_share;
}

RouterPolicy::RouterPolicy(RouterPolicyConfig config)
    : config_(config),
      packets_sent_(config.hashed_table_size),
      prev_packets_sent_(config.hashed_table_size) {}

void RouterPolicy::advance_area(double now) {
  if (now < q_change_time_) {
    throw SimulationError("router event at t=" + std::to_string(now) +
                          " precedes last queue change at t=" +
                          std::to_string(q_change_time_));
  }
  area_ += q_length_ * (now - q_change_time_);
}

void RouterPolicy::on_arrival(double now) {
  advance_area(now);
  ++q_length_;
  q_change_time_ = now;
  if (q_length_ == 1) {
    // Regeneration point: close the previous cycle.
    prev_cycle_begin_time_ = cycle_begin_time_;
    cycle_begin_time_ = now;
    prev_area_ = area_;
    area_ = 0.0;
    prev_packets_sent_ = packets_sent_;
    packets_sent_.clear();
  }
}

bool RouterPolicy::on_departure(const FlowId& flow, double now) {
  if (q_length_ < 1) {
    throw SimulationError("departure from an empty queue");
  }
  advance_area(now);
  --q_length_;
  q_change_time_ = now;
  double elapsed = now - prev_cycle_begin_time_;
  if (!(elapsed > 0.0)) {
    throw SimulationError("zero averaging interval at departure");
  }
  avg_q_length_ = (area_ + prev_area_) / elapsed;
  packets_sent_.increment(flow);

  if (avg_q_length_ > config_.overload_threshold) return true;
  if (avg_q_length_ < config_.underload_threshold) return false;
  return packets_sent_.count(flow) + prev_packets_sent_.count(flow) > fair_share();
}

double RouterPolicy::average_queue_length(double now) const {
  if (!(now > prev_cycle_begin_time_)) {
    throw DomainError("average_queue_length: query time must follow the "
                      "previous regeneration point");
  }
  if (now < q_change_time_) {
    throw DomainError("average_queue_length: query precedes last queue change");
  }
  double area_to_now = area_ + q_length_ * (now - q_change_time_);
  return (area_to_now + prev_area_) / (now - prev_cycle_begin_time_);
}

std::vector<double> RouterPolicy::two_cycle_demands() const {
  std::vector<double> demands;
  if (packets_sent_.hashed()) {
    auto cur = packets_sent_.slots();
    auto prev = prev_packets_sent_.slots();
    demands.reserve(cur.size());
    for (std::size_t i = 0; i < cur.size(); ++i) demands.push_back(cur[i] + prev[i]);
    return demands;
  }
  // Union of flows seen in either cycle, ordered for reproducibility.
  std::vector<FlowId> flows;
  std::unordered_set<FlowId, FlowIdHash> seen;
  for (const auto* table : {&packets_sent_, &prev_packets_sent_}) {
    for (const auto& [flow, count] : table->by_flow()) {
      if (seen.insert(flow).second) flows.push_back(flow);
    }
  }
  std::sort(flows.begin(), flows.end());
  demands.reserve(flows.size());
  for (const auto& f : flows) {
    demands.push_back(packets_sent_.count(f) + prev_packets_sent_.count(f));
  }
  return demands;
}

double RouterPolicy::fair_share() const {
  auto demands = two_cycle_demands();
  return fair_share_of(demands, config_.capacity_factor);
}

}  // namespace decbit
