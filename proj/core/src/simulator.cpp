#include "decbit/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "decbit/errors.hpp"

namespace decbit {

namespace {

// Same-time ordering: everything that is not a service completion runs
// first; completions follow in upstream-to-downstream hop order.
constexpr int kRankDefault = 0;
int completion_rank(std::uint32_t hop) { return 1 + static_cast<int>(hop); }

}  // namespace

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double exponential_sample(std::mt19937_64& rng, double mean) {
  return -mean * std::log1p(-unit_uniform(rng));
}

Simulator::Simulator(Scenario scenario, bool record_trace)
    : scenario_(std::move(scenario)), record_trace_(record_trace), rng_(scenario_.run.seed) {
  validate(scenario_);
  RouterPolicyConfig rcfg;
  rcfg.capacity_factor = scenario_.params.capacity_factor;
  rcfg.hashed_table_size = scenario_.params.table_size;
  router_policies_.assign(scenario_.routers.size(), RouterPolicy(rcfg));
  router_state_.resize(scenario_.routers.size());
  waiters_.resize(scenario_.users.size());

  const bool fixed = scenario_.run.mode == RunMode::kFixedWindow;
  for (std::size_t u = 0; u < scenario_.users.size(); ++u) {
    const auto& spec = scenario_.users[u];
    UserPolicyConfig ucfg;
    ucfg.cutoff = scenario_.params.cutoff;
    ucfg.decrease_factor = scenario_.params.decrease_factor;
    ucfg.increase_amount = scenario_.params.increase_amount;
    ucfg.w_max = default_window_max(scenario_, u);
    if (fixed) {
      ucfg.initial_window = *spec.window;
      ucfg.w_max = std::max(ucfg.w_max, *spec.window);
    }
    UserRuntime rt;
    rt.control = WindowController(ucfg);
    for (const auto& hop : spec.path) rt.path.push_back(*scenario_.router_index(hop));
    rt.flow = FlowId{static_cast<std::uint32_t>(u + 1),
                     static_cast<std::uint32_t>(0x10000 + u + 1)};
    rt.adaptive = !fixed;
    users_.push_back(std::move(rt));
  }
}

TraceRecord Simulator::user_record(std::size_t u, double now, TraceEvent ev) const {
  TraceRecord rec;
  rec.time = now;
  rec.user = static_cast<int>(u);
  rec.event = ev;
  rec.w = users_[u].control.window();
  rec.w_used = users_[u].control.window_used();
  return rec;
}

void Simulator::emit(TraceRecord rec) {
  if (stats_) stats_->observe(rec);
  if (record_observer_) record_observer_(rec);
  if (record_trace_) trace_.push_back(rec);
}

RunResult Simulator::run() {
  if (stats_ != nullptr || events_.inserted() != 0) {
    throw SimulationError("Simulator::run may only be called once");
  }
  const double end_time = scenario_.run.end_time;
  const double measure_begin = scenario_.run.warmup_fraction * end_time;
  StatsCollector stats(scenario_.users.size(), scenario_.routers.size(), measure_begin);
  stats_ = &stats;

  for (std::size_t u = 0; u < scenario_.users.size(); ++u) {
    const auto& spec = scenario_.users[u];
    if (spec.start_after) {
      auto leader = *scenario_.user_index(spec.start_after->user);
      if (spec.start_after->packets == 0) {
        events_.push(0.0, kRankDefault, Payload{Kind::kUserStart, static_cast<std::uint32_t>(u), {}});
      } else {
        waiters_[leader].push_back(u);
      }
    } else {
      events_.push(spec.start_time, kRankDefault,
                   Payload{Kind::kUserStart, static_cast<std::uint32_t>(u), {}});
    }
  }

  double now = 0.0;
  while (!events_.empty() && events_.top().time < end_time) {
    auto e = events_.pop();
    now = e.time;
    dispatch(e);
  }
  const double stop = events_.empty() ? std::min(now, end_time) : end_time;
  stats.finish(std::max(stop, measure_begin));
  stats_ = nullptr;

  RunResult result;
  result.trace = std::move(trace_);
  result.users = stats.users();
  result.routers = stats.routers();
  for (const auto& u : users_) result.final_window_used.push_back(u.control.window_used());
  result.measure_begin = measure_begin;
  result.end_time = std::max(stop, measure_begin);
  result.generated = generated_;
  result.delivered = delivered_;
  result.in_flight = generated_ - delivered_;
  return result;
}

void Simulator::dispatch(const EventQueue<Payload>::Entry& e) {
  const auto& p = e.payload;
  switch (p.kind) {
    case Kind::kUserStart:
      start_user(p.index, e.time);
      break;
    case Kind::kSourceReady:
      users_[p.index].ready_pending = false;
      try_send(p.index, e.time);
      break;
    case Kind::kArrival:
      arrive(p.index, p.packet, e.time);
      break;
    case Kind::kServiceDone:
      complete_service(p.index, e.time);
      break;
    case Kind::kDeliver:
      deliver(p.packet, e.time);
      break;
    case Kind::kAck:
      acknowledge(p.packet, e.time);
      break;
  }
}

void Simulator::start_user(std::size_t u, double now) {
  auto& user = users_[u];
  if (user.started) return;
  user.started = true;
  user.active = true;
  emit(user_record(u, now, TraceEvent::kStart));
  try_send(u, now);
}

void Simulator::try_send(std::size_t u, double now) {
  auto& user = users_[u];
  const auto& spec = scenario_.users[u];
  const double gap = scenario_.run.source_gap;
  while (user.active && user.outstanding < static_cast<std::uint64_t>(user.control.window_used())) {
    if (spec.packet_budget && user.sent >= *spec.packet_budget) return;
    if (scenario_.run.packet_limit && generated_ >= *scenario_.run.packet_limit) return;
    if (user.has_sent && now < user.last_send + gap) {
      if (!user.ready_pending) {
        user.ready_pending = true;
        events_.push(user.last_send + gap, kRankDefault,
                     Payload{Kind::kSourceReady, static_cast<std::uint32_t>(u), {}});
      }
      return;
    }
    Packet pkt;
    pkt.flow = user.flow;
    pkt.user = static_cast<std::uint32_t>(u);
    pkt.seq = static_cast<std::int64_t>(user.sent + 1);
    pkt.created_at = now;
    pkt.hop = 0;
    ++user.sent;
    ++user.outstanding;
    ++generated_;
    user.last_send = now;
    user.has_sent = true;

    auto rec = user_record(u, now, TraceEvent::kSend);
    rec.seq = pkt.seq;
    emit(rec);
    events_.push(now + scenario_.run.access_delay, kRankDefault,
                 Payload{Kind::kArrival, static_cast<std::uint32_t>(user.path[0]), pkt});

    for (std::size_t w : waiters_[u]) {
      if (scenario_.users[w].start_after->packets == user.sent) {
        events_.push(now, kRankDefault,
                     Payload{Kind::kUserStart, static_cast<std::uint32_t>(w), {}});
      }
    }
  }
}

double Simulator::sample_service(std::size_t r) {
  const auto& spec = scenario_.routers[r];
  if (spec.distribution == ServiceDistribution::kDeterministic) return spec.mean_service_time;
  return exponential_sample(rng_, spec.mean_service_time);
}

void Simulator::arrive(std::size_t r, Packet p, double now) {
  auto& policy = router_policies_[r];
  auto& state = router_state_[r];
  policy.on_arrival(now);
  p.hop_arrival = now;
  state.fifo.push_back(p);

  auto rec = user_record(p.user, now, TraceEvent::kArrive);
  rec.seq = p.seq;
  rec.bit = p.congestion_bit;
  rec.router = static_cast<int>(r);
  rec.qlen = policy.queue_length();
  rec.avg_qlen = policy.last_average();
  emit(rec);
  if (router_observer_) router_observer_(r, policy, now);

  if (!state.busy) begin_service(r, now);
}

void Simulator::begin_service(std::size_t r, double now) {
  auto& state = router_state_[r];
  state.busy = true;
  const Packet& head = state.fifo[state.fifo_head];
  events_.push(now + sample_service(r), completion_rank(head.hop),
               Payload{Kind::kServiceDone, static_cast<std::uint32_t>(r), {}});
}

void Simulator::complete_service(std::size_t r, double now) {
  auto& policy = router_policies_[r];
  auto& state = router_state_[r];
  if (state.fifo_head >= state.fifo.size()) {
    throw SimulationError("service completion at an empty router");
  }
  Packet p = state.fifo[state.fifo_head++];
  if (state.fifo_head == state.fifo.size()) {
    state.fifo.clear();
    state.fifo_head = 0;
  } else if (state.fifo_head > 1024 && state.fifo_head * 2 > state.fifo.size()) {
    state.fifo.erase(state.fifo.begin(),
                     state.fifo.begin() + static_cast<std::ptrdiff_t>(state.fifo_head));
    state.fifo_head = 0;
  }

  if (policy.on_departure(p.flow, now)) p.congestion_bit = true;

  auto rec = user_record(p.user, now, TraceEvent::kDepart);
  rec.seq = p.seq;
  rec.bit = p.congestion_bit;
  rec.router = static_cast<int>(r);
  rec.qlen = policy.queue_length();
  rec.avg_qlen = policy.last_average();
  emit(rec);
  if (router_observer_) router_observer_(r, policy, now);

  state.busy = false;
  if (state.fifo_head < state.fifo.size()) begin_service(r, now);

  const auto& path = users_[p.user].path;
  const double out = now + scenario_.routers[r].propagation_delay;
  ++p.hop;
  if (p.hop < path.size()) {
    events_.push(out, kRankDefault,
                 Payload{Kind::kArrival, static_cast<std::uint32_t>(path[p.hop]), p});
  } else {
    events_.push(out, kRankDefault, Payload{Kind::kDeliver, p.user, p});
  }
}

void Simulator::deliver(Packet p, double now) {
  ++delivered_;
  auto rec = user_record(p.user, now, TraceEvent::kDeliver);
  rec.seq = p.seq;
  rec.bit = p.congestion_bit;
  emit(rec);
  if (scenario_.run.explicit_ack) {
    events_.push(now + scenario_.run.ack_delay, kRankDefault, Payload{Kind::kAck, p.user, p});
  } else {
    acknowledge(p, now);
  }
}

void Simulator::acknowledge(const Packet& p, double now) {
  const std::size_t u = p.user;
  auto& user = users_[u];
  if (user.outstanding == 0) {
    throw SimulationError("acknowledgment with no packet outstanding");
  }
  --user.outstanding;
  auto rec = user_record(u, now, TraceEvent::kAck);
  rec.seq = p.seq;
  rec.bit = p.congestion_bit;
  emit(rec);

  if (user.adaptive) {
    if (auto d = user.control.record_ack(p.congestion_bit)) {
      user.control.apply(*d);
      emit(user_record(u, now, *d == Decision::kIncrease ? TraceEvent::kIncrease
                                                         : TraceEvent::kDecrease));
    }
  }
  try_send(u, now);
}

RunResult run_scenario(const Scenario& scenario, bool record_trace) {
  Simulator sim(scenario, record_trace);
  return sim.run();
}

std::vector<metrics::SweepPoint> fixed_window_run(const Scenario& scenario,
                                                  std::span<const int> windows) {
  if (windows.size() != scenario.users.size()) {
    throw ConfigError("fixed_window_run: one window per user required");
  }
  Scenario pinned = scenario;
  pinned.run.mode = RunMode::kFixedWindow;
  for (std::size_t u = 0; u < windows.size(); ++u) {
    if (windows[u] < 1) throw ConfigError("fixed_window_run: window must be >= 1");
    pinned.users[u].window = windows[u];
  }
  auto result = run_scenario(pinned, false);
  std::vector<metrics::SweepPoint> points;
  for (std::size_t u = 0; u < windows.size(); ++u) {
    points.push_back({windows[u], result.users[u].throughput, result.users[u].mean_response_time});
  }
  return points;
}

std::vector<metrics::SweepPoint> sweep_windows(const Scenario& scenario, int first, int last,
                                               std::size_t user, unsigned threads) {
  if (first < 1 || last < first) {
    throw ConfigError("sweep: window range must satisfy 1 <= first <= last");
  }
  if (user >= scenario.users.size()) throw ConfigError("sweep: scenario has no such user");
  const std::size_t n = static_cast<std::size_t>(last - first + 1);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  std::vector<metrics::SweepPoint> points(n);
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < n; i += stride) {
      std::vector<int> windows(scenario.users.size(), first + static_cast<int>(i));
      points[i] = fixed_window_run(scenario, windows)[user];
    }
  };
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::future<void>> jobs;
  for (std::size_t t = 1; t < workers; ++t) jobs.push_back(std::async(std::launch::async, work, t, workers));
  work(0, workers);
  for (auto& j : jobs) j.get();
  return points;
}

}  // namespace decbit
