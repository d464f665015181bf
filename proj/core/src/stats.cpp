#include "decbit/stats.hpp"

#include <algorithm>

#include "decbit/errors.hpp"

namespace decbit {

StatsCollector::StatsCollector(std::size_t n_users, std::size_t n_routers,
                               double measure_begin)
    : begin_(measure_begin),
      users_(n_users),
      routers_(n_routers),
      user_tracks_(n_users),
      router_tracks_(n_routers) {}

void StatsCollector::advance(RouterTrack& t, double now) {
  double from = std::max(t.last_change, begin_);
  if (now > from) {
    t.area += t.qlen * (now - from);
    if (t.qlen > 0) t.busy += now - from;
  }
  t.last_change = now;
}

void StatsCollector::observe(const TraceRecord& r) {
  auto user_at = [&](int u) -> std::size_t {
    if (u < 0 || static_cast<std::size_t>(u) >= users_.size()) {
      throw ConfigError("trace references an unknown user");
    }
    return static_cast<std::size_t>(u);
  };
  auto router_at = [&](int k) -> std::size_t {
    if (k < 0 || static_cast<std::size_t>(k) >= routers_.size()) {
      throw ConfigError("trace references an unknown router");
    }
    return static_cast<std::size_t>(k);
  };

  switch (r.event) {
    case TraceEvent::kStart:
      user_tracks_[user_at(r.user)].start = r.time;
      break;
    case TraceEvent::kSend: {
      auto u = user_at(r.user);
      ++users_[u].sent;
      user_tracks_[u].send_of[r.seq] = r.time;
      break;
    }
    case TraceEvent::kDeliver: {
      auto u = user_at(r.user);
      auto& track = user_tracks_[u];
      auto it = track.send_of.find(r.seq);
      if (it == track.send_of.end()) {
        throw ConfigError("trace delivers a packet that was never sent");
      }
      if (r.time >= begin_) {
        ++users_[u].delivered;
        track.response_sum += r.time - it->second;
      }
      track.send_of.erase(it);
      break;
    }
    case TraceEvent::kArrive: {
      auto k = router_at(r.router);
      auto& t = router_tracks_[k];
      advance(t, r.time);
      t.qlen = r.qlen;
      t.arrival_of[{r.user, r.seq}] = r.time;
      break;
    }
    case TraceEvent::kDepart: {
      auto k = router_at(r.router);
      auto& t = router_tracks_[k];
      advance(t, r.time);
      t.qlen = r.qlen;
      auto it = t.arrival_of.find({r.user, r.seq});
      if (it == t.arrival_of.end()) {
        throw ConfigError("trace departs a packet that never arrived");
      }
      if (r.time >= begin_) {
        ++routers_[k].departures;
        t.sojourn_sum += r.time - it->second;
      }
      t.arrival_of.erase(it);
      break;
    }
    case TraceEvent::kAck:
    case TraceEvent::kIncrease:
    case TraceEvent::kDecrease:
      break;
  }
}

void StatsCollector::finish(double end_time) {
  end_ = end_time;
  const double span = end_ - begin_;
  for (std::size_t u = 0; u < users_.size(); ++u) {
    auto& s = users_[u];
    const auto& t = user_tracks_[u];
    s.active_time = t.start < 0.0 ? 0.0 : std::max(0.0, end_ - std::max(begin_, t.start));
    s.throughput = s.active_time > 0.0 ? static_cast<double>(s.delivered) / s.active_time : 0.0;
    s.mean_response_time =
        s.delivered > 0 ? t.response_sum / static_cast<double>(s.delivered) : 0.0;
  }
  for (std::size_t k = 0; k < routers_.size(); ++k) {
    auto& t = router_tracks_[k];
    advance(t, end_);
    auto& s = routers_[k];
    if (span > 0.0) {
      s.throughput = static_cast<double>(s.departures) / span;
      s.utilization = t.busy / span;
      s.mean_queue_length = t.area / span;
    }
    s.mean_response_time =
        s.departures > 0 ? t.sojourn_sum / static_cast<double>(s.departures) : 0.0;
  }
}

}  // namespace decbit
