#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "decbit/event_queue.hpp"
#include "decbit/flow_id.hpp"
#include "decbit/metrics.hpp"
#include "decbit/router_policy.hpp"
#include "decbit/scenario.hpp"
#include "decbit/stats.hpp"
#include "decbit/trace.hpp"
#include "decbit/user_policy.hpp"

namespace decbit {

struct Packet {
  FlowId flow;
  std::uint32_t user = 0;
  std::int64_t seq = 0;
  bool congestion_bit = false;
  double created_at = 0.0;
  double hop_arrival = 0.0;
  std::uint32_t hop = 0;
};

struct RunResult {
  std::vector<TraceRecord> trace;  // empty unless recording was requested
  std::vector<UserStats> users;
  std::vector<RouterStats> routers;
  std::vector<int> final_window_used;
  double measure_begin = 0.0;
  double end_time = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t in_flight = 0;
};

// Deterministic packet-level simulator for window-controlled sources sending
// through chains of single-server FIFO routers.
//
// Events at equal times run arrivals, deliveries, acks and source activity
// first, then service completions ordered by the hop index of the packet in
// service (upstream first). A packet handed from one router to the next at
// the instant the downstream server frees up therefore joins its busy period
// instead of opening a new regeneration cycle.
class Simulator {
 public:
  using RouterObserver =
      std::function<void(std::size_t router, const RouterPolicy& policy, double now)>;
  using RecordObserver = std::function<void(const TraceRecord&)>;

  explicit Simulator(Scenario scenario, bool record_trace = true);

  // Called after every router arrival and departure.
  void set_router_observer(RouterObserver observer) { router_observer_ = std::move(observer); }
  // Called for every trace record as it is produced.
  void set_record_observer(RecordObserver observer) { record_observer_ = std::move(observer); }

  RunResult run();

  const Scenario& scenario() const { return scenario_; }
  const std::vector<RouterPolicy>& routers() const { return router_policies_; }
  const WindowController& controller(std::size_t user) const { return users_.at(user).control; }

 private:
  enum class Kind : std::uint8_t { kUserStart, kSourceReady, kArrival, kServiceDone, kDeliver, kAck };
  struct Payload {
    Kind kind;
    std::uint32_t index;  // user or router, per kind
    Packet packet;
  };
  struct UserRuntime {
    std::vector<std::size_t> path;
    FlowId flow;
    WindowController control;
    bool adaptive = true;
    bool active = false;
    bool started = false;
    bool ready_pending = false;
    std::uint64_t outstanding = 0;
    std::uint64_t sent = 0;
    double last_send = 0.0;
    bool has_sent = false;
  };
  struct RouterRuntime {
    std::vector<Packet> fifo;  // front at fifo_head
    std::size_t fifo_head = 0;
    bool busy = false;
  };

  void dispatch(const EventQueue<Payload>::Entry& e);
  void start_user(std::size_t u, double now);
  void try_send(std::size_t u, double now);
  void arrive(std::size_t r, Packet p, double now);
  void begin_service(std::size_t r, double now);
  void complete_service(std::size_t r, double now);
  void deliver(Packet p, double now);
  void acknowledge(const Packet& p, double now);
  double sample_service(std::size_t r);
  void emit(TraceRecord rec);
  TraceRecord user_record(std::size_t u, double now, TraceEvent ev) const;

  Scenario scenario_;
  bool record_trace_;
  std::vector<RouterPolicy> router_policies_;
  std::vector<RouterRuntime> router_state_;
  std::vector<UserRuntime> users_;
  // waiters_[u] lists users that start once user u has sent enough packets.
  std::vector<std::vector<std::size_t>> waiters_;
  EventQueue<Payload> events_;
  std::mt19937_64 rng_;
  std::uint64_t generated_ = 0;
  std::uint64_t delivered_ = 0;
  RouterObserver router_observer_;
  RecordObserver record_observer_;
  std::vector<TraceRecord> trace_;
  StatsCollector* stats_ = nullptr;
};

RunResult run_scenario(const Scenario& scenario, bool record_trace = true);

// Pin every user's window (in order) and report each user's steady-state
// throughput and response time after the warm-up interval.
std::vector<metrics::SweepPoint> fixed_window_run(const Scenario& scenario,
                                                  std::span<const int> windows);

// One fixed-window run per window in [first, last], all users pinned to the
// same window. Returns the SweepPoint of `user` for each run. Independent
// runs are spread across `threads` workers (0 = hardware concurrency).
std::vector<metrics::SweepPoint> sweep_windows(const Scenario& scenario, int first, int last,
                                               std::size_t user = 0, unsigned threads = 0);

// Uniform double in [0, 1) from the top 53 bits of one generator draw.
double unit_uniform(std::mt19937_64& rng);
double exponential_sample(std::mt19937_64& rng, double mean);

}  // namespace decbit
