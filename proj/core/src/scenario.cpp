#include "decbit/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "decbit/errors.hpp"

namespace decbit {

namespace {

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string word;
  while (in >> word) out.push_back(word);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view v, std::size_t line, std::string_view key) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    fail(line, "'" + std::string(key) + "' expects a number, got '" +
                   std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_uint(std::string_view v, std::size_t line, std::string_view key) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    fail(line, "'" + std::string(key) + "' expects a non-negative integer, got '" +
                   std::string(v) + "'");
  }
  return out;
}

int parse_int(std::string_view v, std::size_t line, std::string_view key) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    fail(line, "'" + std::string(key) + "' expects an integer, got '" +
                   std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view v, std::size_t line, std::string_view key) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(line, "'" + std::string(key) + "' expects true or false, got '" +
                 std::string(v) + "'");
}

void set_run(RunControls& run, std::string_view key, std::string_view value,
             std::size_t line) {
  if (key == "end_time") {
    run.end_time = parse_double(value, line, key);
  } else if (key == "packet_limit") {
    run.packet_limit = parse_uint(value, line, key);
  } else if (key == "seed") {
    run.seed = parse_uint(value, line, key);
  } else if (key == "mode") {
    if (value == "adaptive") {
      run.mode = RunMode::kAdaptive;
    } else if (value == "fixed") {
      run.mode = RunMode::kFixedWindow;
    } else {
      fail(line, "'mode' must be adaptive or fixed, got '" + std::string(value) + "'");
    }
  } else if (key == "explicit_ack") {
    run.explicit_ack = parse_bool(value, line, key);
  } else if (key == "ack_delay") {
    run.ack_delay = parse_double(value, line, key);
  } else if (key == "warmup") {
    run.warmup_fraction = parse_double(value, line, key);
  } else if (key == "source_gap") {
    run.source_gap = parse_double(value, line, key);
  } else if (key == "access_delay") {
    run.access_delay = parse_double(value, line, key);
  } else {
    fail(line, "unknown key '" + std::string(key) + "' in [run]");
  }
}

bool set_param(PolicyParams& p, std::string_view key, std::string_view value,
               std::size_t line) {
  if (key == "cutoff") {
    p.cutoff = parse_double(value, line, key);
  } else if (key == "decrease_factor") {
    p.decrease_factor = parse_double(value, line, key);
  } else if (key == "increase_amount") {
    p.increase_amount = parse_double(value, line, key);
  } else if (key == "capacity_factor") {
    p.capacity_factor = parse_double(value, line, key);
  } else if (key == "table_size") {
    p.table_size = static_cast<std::size_t>(parse_uint(value, line, key));
  } else {
    return false;
  }
  return true;
}

void set_router(ServerSpec& r, std::string_view key, std::string_view value,
                std::size_t line) {
  if (key == "service") {
    if (value == "deterministic") {
      r.distribution = ServiceDistribution::kDeterministic;
    } else if (value == "exponential") {
      r.distribution = ServiceDistribution::kExponential;
    } else {
      fail(line, "'service' must be deterministic or exponential");
    }
  } else if (key == "mean") {
    r.mean_service_time = parse_double(value, line, key);
  } else if (key == "delay") {
    r.propagation_delay = parse_double(value, line, key);
  } else {
    fail(line, "unknown key '" + std::string(key) + "' in [router " + r.name + "]");
  }
}

void set_user(UserSpec& u, std::string_view key, std::string_view value,
              std::size_t line) {
  if (key == "path") {
    u.path = split_words(value);
  } else if (key == "start") {
    u.start_time = parse_double(value, line, key);
  } else if (key == "start_after") {
    auto words = split_words(value);
    if (words.size() != 2) {
      fail(line, "'start_after' expects '<user> <packets>'");
    }
    u.start_after = StartAfter{words[0], parse_uint(words[1], line, key)};
  } else if (key == "packets") {
    u.packet_budget = parse_uint(value, line, key);
  } else if (key == "w_max") {
    u.w_max = parse_int(value, line, key);
  } else if (key == "window") {
    u.window = parse_int(value, line, key);
  } else {
    fail(line, "unknown key '" + std::string(key) + "' in [user " + u.name + "]");
  }
}

}  // namespace

std::optional<std::size_t> Scenario::router_index(std::string_view n) const {
  for (std::size_t i = 0; i < routers.size(); ++i) {
    if (routers[i].name == n) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Scenario::user_index(std::string_view n) const {
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (users[i].name == n) return i;
  }
  return std::nullopt;
}

void validate(const Scenario& s) {
  std::set<std::string> names;
  for (const auto& r : s.routers) {
    if (r.name.empty()) throw ConfigError("router with empty name");
    if (!names.insert(r.name).second) {
      throw ConfigError("router '" + r.name + "' defined twice");
    }
    if (!(r.mean_service_time > 0.0)) {
      throw ConfigError("router '" + r.name + "': mean must be positive");
    }
    if (!(r.propagation_delay >= 0.0)) {
      throw ConfigError("router '" + r.name + "': delay must be non-negative");
    }
  }
  names.clear();
  for (const auto& u : s.users) {
    if (u.name.empty()) throw ConfigError("user with empty name");
    if (!names.insert(u.name).second) {
      throw ConfigError("user '" + u.name + "' defined twice");
    }
    if (u.path.empty()) throw ConfigError("user '" + u.name + "': path is empty");
    for (const auto& hop : u.path) {
      if (!s.router_index(hop)) {
        throw ConfigError("user '" + u.name + "': path references undefined router '" +
                          hop + "'");
      }
    }
    if (!(u.start_time >= 0.0)) {
      throw ConfigError("user '" + u.name + "': start must be non-negative");
    }
    if (u.start_after) {
      if (!s.user_index(u.start_after->user)) {
        throw ConfigError("user '" + u.name + "': start_after references undefined user '" +
                          u.start_after->user + "'");
      }
      if (u.start_after->user == u.name) {
        throw ConfigError("user '" + u.name + "': start_after references itself");
      }
    }
    if (u.w_max < 0) throw ConfigError("user '" + u.name + "': w_max must be >= 1");
    if (u.window && *u.window < 1) {
      throw ConfigError("user '" + u.name + "': window must be >= 1");
    }
    if (s.run.mode == RunMode::kFixedWindow && !u.window) {
      throw ConfigError("user '" + u.name + "': fixed mode requires a window");
    }
  }
  const auto& run = s.run;
  if (!(run.end_time >= 0.0)) throw ConfigError("run.end_time must be non-negative");
  if (!(run.warmup_fraction >= 0.0 && run.warmup_fraction < 1.0)) {
    throw ConfigError("run.warmup must lie in [0, 1)");
  }
  if (!(run.ack_delay >= 0.0)) throw ConfigError("run.ack_delay must be non-negative");
  if (!(run.source_gap >= 0.0)) throw ConfigError("run.source_gap must be non-negative");
  if (!(run.access_delay >= 0.0)) throw ConfigError("run.access_delay must be non-negative");
  const auto& p = s.params;
  if (!(p.cutoff > 0.0 && p.cutoff < 1.0)) {
    throw ConfigError("params.cutoff must lie in (0, 1)");
  }
  if (!(p.decrease_factor > 0.0 && p.decrease_factor < 1.0)) {
    throw ConfigError("params.decrease_factor must lie in (0, 1)");
  }
  if (!(p.increase_amount > 0.0)) {
    throw ConfigError("params.increase_amount must be positive");
  }
  if (!(p.capacity_factor > 0.0 && p.capacity_factor <= 1.0)) {
    throw ConfigError("params.capacity_factor must lie in (0, 1]");
  }
}

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  enum class Section { kTop, kRun, kParams, kRouter, kUser } section = Section::kTop;
  std::set<std::string> seen_keys;
  std::size_t line_no = 0;

  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      auto words = split_words(line.substr(1, line.size() - 2));
      if (words.empty()) fail(line_no, "empty section header");
      seen_keys.clear();
      if (words[0] == "run" && words.size() == 1) {
        section = Section::kRun;
      } else if (words[0] == "params" && words.size() == 1) {
        section = Section::kParams;
      } else if (words[0] == "router" && words.size() == 2) {
        section = Section::kRouter;
        s.routers.emplace_back().name = words[1];
      } else if (words[0] == "user" && words.size() == 2) {
        section = Section::kUser;
        s.users.emplace_back().name = words[1];
      } else {
        fail(line_no, "unknown section '" + std::string(line) + "'");
      }
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "missing key");
    if (value.empty()) fail(line_no, "missing value for '" + std::string(key) + "'");
    if (!seen_keys.insert(std::string(key)).second) {
      fail(line_no, "duplicate key '" + std::string(key) + "'");
    }

    switch (section) {
      case Section::kTop:
        if (key != "name") fail(line_no, "unknown top-level key '" + std::string(key) + "'");
        s.name = std::string(value);
        break;
      case Section::kRun:
        set_run(s.run, key, value, line_no);
        break;
      case Section::kParams:
        if (!set_param(s.params, key, value, line_no)) {
          fail(line_no, "unknown key '" + std::string(key) + "' in [params]");
        }
        break;
      case Section::kRouter:
        set_router(s.routers.back(), key, value, line_no);
        break;
      case Section::kUser:
        set_user(s.users.back(), key, value, line_no);
        break;
    }
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string render_scenario(const Scenario& s) {
  std::ostringstream out;
  if (!s.name.empty()) out << "name = " << s.name << "\n\n";

  const auto& run = s.run;
  out << "[run]\n";
  out << "end_time = " << format_double(run.end_time) << "\n";
  if (run.packet_limit) out << "packet_limit = " << *run.packet_limit << "\n";
  out << "seed = " << run.seed << "\n";
  out << "mode = " << (run.mode == RunMode::kAdaptive ? "adaptive" : "fixed") << "\n";
  out << "explicit_ack = " << (run.explicit_ack ? "true" : "false") << "\n";
  out << "ack_delay = " << format_double(run.ack_delay) << "\n";
  out << "warmup = " << format_double(run.warmup_fraction) << "\n";
  out << "source_gap = " << format_double(run.source_gap) << "\n";
  out << "access_delay = " << format_double(run.access_delay) << "\n\n";

  const auto& p = s.params;
  out << "[params]\n";
  out << "cutoff = " << format_double(p.cutoff) << "\n";
  out << "decrease_factor = " << format_double(p.decrease_factor) << "\n";
  out << "increase_amount = " << format_double(p.increase_amount) << "\n";
  out << "capacity_factor = " << format_double(p.capacity_factor) << "\n";
  out << "table_size = " << p.table_size << "\n";

  for (const auto& r : s.routers) {
    out << "\n[router " << r.name << "]\n";
    out << "service = "
        << (r.distribution == ServiceDistribution::kDeterministic ? "deterministic"
                                                                  : "exponential")
        << "\n";
    out << "mean = " << format_double(r.mean_service_time) << "\n";
    out << "delay = " << format_double(r.propagation_delay) << "\n";
  }
  for (const auto& u : s.users) {
    out << "\n[user " << u.name << "]\n";
    out << "path =";
    for (const auto& hop : u.path) out << ' ' << hop;
    out << "\n";
    out << "start = " << format_double(u.start_time) << "\n";
    if (u.start_after) {
      out << "start_after = " << u.start_after->user << ' ' << u.start_after->packets
          << "\n";
    }
    if (u.packet_budget) out << "packets = " << *u.packet_budget << "\n";
    out << "w_max = " << u.w_max << "\n";
    if (u.window) out << "window = " << *u.window << "\n";
  }
  return out.str();
}

void apply_override(Scenario& s, std::string_view assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  std::string_view key = trim(assignment.substr(0, eq));
  std::string_view value = trim(assignment.substr(eq + 1));
  if (key.empty() || value.empty()) {
    throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
  }
  try {
    if (key.starts_with("run.")) {
      set_run(s.run, key.substr(4), value, 0);
    } else if (key.starts_with("params.")) {
      if (!set_param(s.params, key.substr(7), value, 0)) {
        throw ConfigError("unknown parameter '" + std::string(key) + "'");
      }
    } else if (!set_param(s.params, key, value, 0)) {
      set_run(s.run, key, value, 0);
    }
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    // Drop the meaningless "line 0: " prefix.
    if (msg.starts_with("line 0: ")) msg = msg.substr(8);
    throw ConfigError("--param " + msg);
  }
  validate(s);
}

int default_window_max(const Scenario& s, std::size_t user) {
  const auto& u = s.users.at(user);
  if (u.w_max > 0) return u.w_max;
  double round_trip = 0.0;
  double slowest = 0.0;
  for (const auto& hop : u.path) {
    const auto& r = s.routers[*s.router_index(hop)];
    round_trip += r.mean_service_time + r.propagation_delay;
    slowest = std::max(slowest, r.mean_service_time);
  }
  if (s.run.explicit_ack) round_trip += s.run.ack_delay;
  // Twice the window that just fills the pipe at the bottleneck rate.
  return std::max(1, static_cast<int>(std::ceil(2.0 * round_trip / slowest)));
}

}  // namespace decbit
