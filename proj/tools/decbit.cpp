#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decbit/errors.hpp"
#include "decbit/metrics.hpp"
#include "decbit/report.hpp"
#include "decbit/scenario.hpp"
#include "decbit/simulator.hpp"
#include "decbit/trace.hpp"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A bare name such as `case1` resolves to the bundled scenario of that name.
std::string resolve_scenario(const std::string& arg) {
  if (fs::exists(arg)) return arg;
#ifdef DECBIT_SCENARIO_DIR
  fs::path bundled = fs::path(DECBIT_SCENARIO_DIR) / arg;
  if (!bundled.has_extension()) bundled += ".scn";
  if (fs::exists(bundled)) return bundled.string();
#endif
  return arg;
}

decbit::Scenario prepare(const std::string& path, const std::vector<std::string>& params,
                         std::optional<std::uint64_t> seed, bool explicit_ack) {
  decbit::Scenario s = decbit::load_scenario(resolve_scenario(path));
  for (const auto& p : params) decbit::apply_override(s, p);
  if (seed) s.run.seed = *seed;
  if (explicit_ack) s.run.explicit_ack = true;
  decbit::validate(s);
  return s;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot write " + p.string());
  return out;
}

std::vector<std::string> names_of(const auto& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(i.name);
  return out;
}

int cmd_run(const decbit::Scenario& s, const std::string& out_dir) {
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  decbit::RunResult r = decbit::run_scenario(s);
  decbit::TraceHeader header;
  header.scenario = s.name;
  header.seed = s.run.seed;
  header.end_time = s.run.end_time;
  {
    auto out = open_out(dir / "trace.csv");
    decbit::write_trace_csv(out, header, names_of(s.users), names_of(s.routers), r.trace);
    if (!out) throw IoError("write failed: trace.csv");
  }
  auto report = decbit::build_report(s, r.users, r.routers, r.measure_begin, r.end_time);
  {
    auto out = open_out(dir / "report.txt");
    decbit::write_report_text(out, report);
  }
  {
    auto out = open_out(dir / "report.csv");
    decbit::write_report_csv(out, report);
  }
  decbit::write_report_text(std::cout, report);
  std::cout << "wrote " << (dir / "trace.csv").string() << " (" << r.trace.size()
            << " rows)\n";
  return kOk;
}

std::pair<int, int> parse_range(const std::string& text) {
  auto dots = text.find("..");
  int a = 0;
  int b = 0;
  try {
    if (dots == std::string::npos) {
      a = b = std::stoi(text);
    } else {
      a = std::stoi(text.substr(0, dots));
      b = std::stoi(text.substr(dots + 2));
    }
  } catch (const std::exception&) {
    throw decbit::ConfigError("window range must look like A..B, got '" + text + "'");
  }
  if (a < 1 || b < a) throw decbit::ConfigError("window range must satisfy 1 <= A <= B");
  return {a, b};
}

int cmd_sweep(const decbit::Scenario& s, const std::string& range, const std::string& user,
              unsigned threads, const std::string& csv_path) {
  auto [first, last] = parse_range(range);
  std::size_t u = 0;
  if (!user.empty()) {
    auto idx = s.user_index(user);
    if (!idx) throw decbit::ConfigError("unknown user '" + user + "'");
    u = *idx;
  }
  if (s.users.empty()) throw decbit::ConfigError("scenario has no users to sweep");

  auto t0 = std::chrono::steady_clock::now();
  auto points = decbit::sweep_windows(s, first, last, u, threads);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostream* csv = nullptr;
  std::ofstream csv_file;
  if (!csv_path.empty()) {
    csv_file = open_out(csv_path);
    csv = &csv_file;
    *csv << "window,throughput,response_time,power\n";
  }
  std::printf("%8s %12s %14s %12s\n", "window", "throughput", "response_time", "power");
  for (const auto& p : points) {
    double pw = p.response_time > 0 ? decbit::metrics::power(p.throughput, p.response_time) : 0.0;
    std::printf("%8d %12.6f %14.4f %12.8f\n", p.window, p.throughput, p.response_time, pw);
    if (csv) {
      *csv << p.window << ',' << decbit::format_number(p.throughput) << ','
           << decbit::format_number(p.response_time) << ',' << decbit::format_number(pw) << '\n';
    }
  }
  auto knee = decbit::metrics::knee_from_sweep(points);
  std::printf("knee window %d power %.8f (%zu runs, %.2f s)\n", knee.window, knee.power,
              points.size(), secs);
  return kOk;
}

int cmd_metrics(const decbit::Scenario& s, const std::string& trace_path, bool csv) {
  std::ifstream in(trace_path);
  if (!in) throw IoError("cannot read " + trace_path);
  auto trace = decbit::read_trace_csv(in);
  auto report = decbit::report_from_trace(s, trace);
  if (csv) {
    decbit::write_report_csv(std::cout, report);
  } else {
    decbit::write_report_text(std::cout, report);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DECbit congestion avoidance simulator"};
  app.require_subcommand(1);

  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  bool explicit_ack = false;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--param", params, "Policy or run override, key=value (repeatable)");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_flag("--explicit-ack", explicit_ack, "Send acknowledgments as packets with ack_delay");
  };

  std::string scenario_path;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Simulate a scenario and write trace.csv and reports");
  run->add_option("scenario", scenario_path, "Scenario file or bundled name")->required();
  run->add_option("-o,--out", out_dir, "Output directory");
  common(run);

  std::string range;
  std::string sweep_user;
  std::string sweep_csv;
  unsigned threads = 0;
  auto* sweep = app.add_subcommand("sweep", "Fixed-window sweep and knee estimate");
  sweep->add_option("scenario", scenario_path, "Scenario file or bundled name")->required();
  sweep->add_option("--windows", range, "Window range A..B")->required();
  sweep->add_option("--user", sweep_user, "User whose throughput is reported (default: first)");
  sweep->add_option("--threads", threads, "Worker threads (0 = all cores)");
  sweep->add_option("--csv", sweep_csv, "Also write the table to this CSV file");
  common(sweep);

  std::string trace_path;
  bool metrics_csv = false;
  auto* metrics = app.add_subcommand("metrics", "Recompute a report from a run trace");
  metrics->add_option("trace", trace_path, "trace.csv written by run")->required();
  metrics->add_option("scenario", scenario_path, "Scenario the trace was produced from")->required();
  metrics->add_flag("--csv", metrics_csv, "Emit kind,name,metric,value rows");
  common(metrics);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    auto s = prepare(scenario_path, params, seed, explicit_ack);
    if (*run) return cmd_run(s, out_dir);
    if (*sweep) return cmd_sweep(s, range, sweep_user, threads, sweep_csv);
    return cmd_metrics(s, trace_path, metrics_csv);
  } catch (const decbit::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
