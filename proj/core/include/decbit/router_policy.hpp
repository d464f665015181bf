#pragma once

#include <cstddef>
#include <span>
#include <unordered_map>
#include <vector>

#include "decbit/flow_id.hpp"

namespace decbit {

struct RouterPolicyConfig {
  // Share of the observed two-cycle throughput treated as knee capacity.
  double capacity_factor = 0.9;
  // Average queue length below which no bit is set.
  double underload_threshold = 1.0;
  // Average queue length above which every packet gets the bit.
  double overload_threshold = 2.0;
  // 0 keeps one exact counter per flow. A positive size folds flows into a
  // fixed number of hashed slots; colliding flows share a counter.
  std::size_t hashed_table_size = 0;
};

// Per-cycle packet counts keyed by flow, plus the cycle total.
class PacketCountTable {
 public:
  explicit PacketCountTable(std::size_t hashed_size = 0);

  void increment(const FlowId& flow);
  void clear();

  double count(const FlowId& flow) const;
  double total() const { return total_; }
  bool hashed() const { return !slots_.empty(); }
  std::size_t slot_of(const FlowId& flow) const;

  // Exact mode only.
  const std::unordered_map<FlowId, double, FlowIdHash>& by_flow() const {
    return by_flow_;
  }
  // Hashed mode only.
  std::span<const double> slots() const { return slots_; }

 private:
  std::unordered_map<FlowId, double, FlowIdHash> by_flow_;
  std::vector<double> slots_;
  double total_ = 0.0;
};

// Iterative fair-share computation over two-cycle demands. Every entry of
// `demands` counts as a user, including zero-demand entries.
double fair_share_of(std::span<const double> demands, double capacity_factor);

// Queue bookkeeping and feedback-bit decisions for one single-server router.
// Queue length counts the packet in service. The queue-length average spans
// the previous regeneration cycle plus the elapsed part of the current one.
class RouterPolicy {
 public:
  explicit RouterPolicy(RouterPolicyConfig config = {});

  void on_arrival(double now);
  // Returns whether the departing packet of `flow` must carry the bit.
  bool on_departure(const FlowId& flow, double now);

  double average_queue_length(double now) const;
  double fair_share() const;
  // Two-cycle demand of each table entry, in table order.
  std::vector<double> two_cycle_demands() const;

  const RouterPolicyConfig& config() const { return config_; }
  int queue_length() const { return q_length_; }
  double area() const { return area_; }
  double prev_area() const { return prev_area_; }
  double q_change_time() const { return q_change_time_; }
  double cycle_begin_time() const { return cycle_begin_time_; }
  double prev_cycle_begin_time() const { return prev_cycle_begin_time_; }
  double last_average() const { return avg_q_length_; }
  const PacketCountTable& packets_sent() const { return packets_sent_; }
  const PacketCountTable& prev_packets_sent() const { return prev_packets_sent_; }

 private:
  void advance_area(double now);

  RouterPolicyConfig config_;
  int q_length_ = 0;
  double area_ = 0.0;
  double prev_area_ = 0.0;
  double q_change_time_ = 0.0;
  double cycle_begin_time_ = 0.0;
  double prev_cycle_begin_time_ = 0.0;
  double avg_q_length_ = 0.0;
  PacketCountTable packets_sent_;
  PacketCountTable prev_packets_sent_;
};

}  // namespace decbit
