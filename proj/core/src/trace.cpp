#include "decbit/trace.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "decbit/errors.hpp"

namespace decbit {

namespace {

constexpr std::array<std::string_view, 8> kEventNames = {
    "start", "send", "arrive", "depart", "deliver", "ack", "increase", "decrease"};

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    auto comma = line.find(',');
    out.push_back(line.substr(0, comma));
    if (comma == std::string_view::npos) break;
    line.remove_prefix(comma + 1);
  }
  return out;
}

[[noreturn]] void bad(std::size_t line, const std::string& what) {
  throw ConfigError("trace line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_field(std::string_view v, std::size_t line, std::string_view column) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    bad(line, "bad value '" + std::string(v) + "' in column " + std::string(column));
  }
  return out;
}

int intern(std::vector<std::string>& names, std::unordered_map<std::string, int>& index,
           std::string_view name) {
  auto [it, inserted] = index.try_emplace(std::string(name), static_cast<int>(names.size()));
  if (inserted) names.emplace_back(name);
  return it->second;
}

}  // namespace

std::string_view to_string(TraceEvent e) {
  return kEventNames[static_cast<std::size_t>(e)];
}

std::optional<TraceEvent> trace_event_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i) {
    if (kEventNames[i] == s) return static_cast<TraceEvent>(i);
  }
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

void write_trace_csv(std::ostream& out, const TraceHeader& header,
                     const std::vector<std::string>& user_names,
                     const std::vector<std::string>& router_names,
                     const std::vector<TraceRecord>& records) {
  out << "# decbit-trace version=" << header.version << " scenario=" << header.scenario
      << " rng=" << header.rng << " seed=" << header.seed
      << " end_time=" << format_number(header.end_time) << '\n';
  out << kTraceColumns << '\n';
  std::string row;
  for (const auto& r : records) {
    row.clear();
    row += format_number(r.time);
    row += ',';
    if (r.user >= 0) row += user_names.at(static_cast<std::size_t>(r.user));
    row += ',';
    row += to_string(r.event);
    row += ',';
    if (r.user >= 0) {
      row += format_number(r.w);
      row += ',';
      row += std::to_string(r.w_used);
    } else {
      row += ',';
    }
    row += ',';
    if (r.seq >= 0) row += std::to_string(r.seq);
    row += ',';
    row += r.bit ? '1' : '0';
    row += ',';
    if (r.router >= 0) {
      row += router_names.at(static_cast<std::size_t>(r.router));
      row += ',';
      row += std::to_string(r.qlen);
      row += ',';
      row += format_number(r.avg_qlen);
    } else {
      row += ",,";
    }
    row += '\n';
    out << row;
  }
}

ParsedTrace read_trace_csv(std::istream& in) {
  ParsedTrace trace;
  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> router_index;
  std::string line;
  std::size_t line_no = 0;
  bool seen_columns = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream words(line.substr(1));
      std::string word;
      words >> word;
      if (word != "decbit-trace") bad(line_no, "not a decbit trace header");
      while (words >> word) {
        auto eq = word.find('=');
        if (eq == std::string::npos) continue;
        std::string key = word.substr(0, eq);
        std::string value = word.substr(eq + 1);
        if (key == "version") {
          trace.header.version = parse_field<int>(value, line_no, key);
          if (trace.header.version != kTraceFormatVersion) {
            bad(line_no, "unsupported trace version " + value);
          }
        } else if (key == "scenario") {
          trace.header.scenario = value;
        } else if (key == "rng") {
          trace.header.rng = value;
        } else if (key == "seed") {
          trace.header.seed = parse_field<std::uint64_t>(value, line_no, key);
        } else if (key == "end_time") {
          trace.header.end_time = parse_field<double>(value, line_no, key);
        }
      }
      continue;
    }
    if (!seen_columns) {
      if (line != kTraceColumns) bad(line_no, "unexpected column header");
      seen_columns = true;
      continue;
    }
    auto f = split_csv(line);
    if (f.size() != 10) bad(line_no, "expected 10 columns");
    TraceRecord r;
    r.time = parse_field<double>(f[0], line_no, "time");
    if (!f[1].empty()) r.user = intern(trace.user_names, user_index, f[1]);
    auto ev = trace_event_from_string(f[2]);
    if (!ev) bad(line_no, "unknown event '" + std::string(f[2]) + "'");
    r.event = *ev;
    if (!f[3].empty()) r.w = parse_field<double>(f[3], line_no, "w");
    if (!f[4].empty()) r.w_used = parse_field<int>(f[4], line_no, "w_used");
    if (!f[5].empty()) r.seq = parse_field<std::int64_t>(f[5], line_no, "seq");
    r.bit = f[6] == "1";
    if (!f[7].empty()) {
      r.router = intern(trace.router_names, router_index, f[7]);
      r.qlen = parse_field<int>(f[8], line_no, "qlen");
      r.avg_qlen = parse_field<double>(f[9], line_no, "avg_qlen");
    }
    trace.records.push_back(r);
  }
  if (!seen_columns) bad(line_no, "missing column header");
  return trace;
}

}  // namespace decbit
