#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decbit {

enum class ServiceDistribution { kDeterministic, kExponential };

// A router modeled as a single FIFO server. propagation_delay is a delay
// line after service; the server is free during it.
struct ServerSpec {
  std::string name;
  ServiceDistribution distribution = ServiceDistribution::kDeterministic;
  double mean_service_time = 1.0;
  double propagation_delay = 0.0;

  friend bool operator==(const ServerSpec&, const ServerSpec&) = default;
};

// Start a user once another user has sent this many packets.
struct StartAfter {
  std::string user;
  std::uint64_t packets = 0;

  friend bool operator==(const StartAfter&, const StartAfter&) = default;
};

struct UserSpec {
  std::string name;
  std::vector<std::string> path;
  double start_time = 0.0;
  std::optional<StartAfter> start_after;
  std::optional<std::uint64_t> packet_budget;
  // 0 means "derive from the path" (twice the pipe size at the bottleneck).
  int w_max = 0;
  // Pinned window for fixed-window runs; ignored in adaptive mode.
  std::optional<int> window;

  friend bool operator==(const UserSpec&, const UserSpec&) = default;
};

enum class RunMode { kAdaptive, kFixedWindow };

struct RunControls {
  double end_time = 10000.0;
  std::optional<std::uint64_t> packet_limit;
  std::uint64_t seed = 1;
  RunMode mode = RunMode::kAdaptive;
  bool explicit_ack = false;
  double ack_delay = 0.0;
  double warmup_fraction = 0.2;
  // Minimum spacing between two sends of the same source.
  double source_gap = 1.0;
  // Time from a send until the packet reaches the first router (the
  // source's own transmission time).
  double access_delay = 0.0;

  friend bool operator==(const RunControls&, const RunControls&) = default;
};

struct PolicyParams {
  double cutoff = 0.5;
  double decrease_factor = 0.875;
  double increase_amount = 1.0;
  double capacity_factor = 0.9;
  std::size_t table_size = 0;

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

struct Scenario {
  std::string name;
  std::vector<ServerSpec> routers;
  std::vector<UserSpec> users;
  RunControls run;
  PolicyParams params;

  std::optional<std::size_t> router_index(std::string_view name) const;
  std::optional<std::size_t> user_index(std::string_view name) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Throws ConfigError naming the offending field.
void validate(const Scenario& scenario);

// Parse the sectioned key = value format. Syntax errors carry the line
// number; the result is validated before it is returned.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

// Canonical text form; parse_scenario(render_scenario(s)) == s.
std::string render_scenario(const Scenario& scenario);

// Apply one `key=value` override. Keys are `run.<field>` or
// `params.<field>`; bare names are looked up in params first.
void apply_override(Scenario& scenario, std::string_view assignment);

// Ceiling used when a user leaves w_max unset.
int default_window_max(const Scenario& scenario, std::size_t user);

}  // namespace decbit
