#include <gtest/gtest.h>

#include <random>
#include <sstream>
#include <string>

#include "decbit/errors.hpp"
#include "decbit/scenario.hpp"
#include "decbit/trace.hpp"

using decbit::ConfigError;
using decbit::Scenario;

namespace {

std::string bundled(const std::string& name) {
  return std::string(DECBIT_SCENARIO_DIR) + "/" + name + ".scn";
}

std::string error_of(const std::string& text) {
  try {
    decbit::parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Scenario, BundledCase1) {
  auto s = decbit::load_scenario(bundled("case1"));
  ASSERT_EQ(s.routers.size(), 4u);
  EXPECT_EQ(s.routers[0].mean_service_time, 2);
  EXPECT_EQ(s.routers[1].mean_service_time, 5);
  EXPECT_EQ(s.routers[2].mean_service_time, 3);
  EXPECT_EQ(s.routers[2].propagation_delay, 62.5);
  EXPECT_EQ(s.routers[3].mean_service_time, 4);
  ASSERT_EQ(s.users.size(), 1u);
  EXPECT_EQ(s.users[0].path.size(), 4u);
  EXPECT_EQ(s.params.cutoff, 0.5);
  EXPECT_EQ(s.params.decrease_factor, 0.875);
  EXPECT_EQ(s.params.capacity_factor, 0.9);
}

TEST(Scenario, BundledCase2AddsLateUser) {
  auto s = decbit::load_scenario(bundled("case2"));
  ASSERT_EQ(s.users.size(), 2u);
  EXPECT_EQ(s.users[1].path, (std::vector<std::string>{"r1", "r2"}));
  ASSERT_TRUE(s.users[1].start_after.has_value());
  EXPECT_EQ(s.users[1].start_after->user, "u1");
  EXPECT_EQ(s.users[1].start_after->packets, 200u);
}

TEST(Scenario, UndefinedRouterIsNamed) {
  auto msg = error_of("name = x\n[router a]\nmean = 1\n[user u]\npath = a b\n");
  EXPECT_NE(msg.find("undefined router 'b'"), std::string::npos) << msg;
}

TEST(Scenario, SyntaxErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("name = x\n[router a]\nmean 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("name = x\n[router a]\nspeed = 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("name = x\n[bogus]\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[run]\nseed = -4\n").find("line 2"), std::string::npos);
  EXPECT_NE(error_of("[params]\ncutoff = 0.5\ncutoff = 0.6\n").find("duplicate"),
            std::string::npos);
}

TEST(Scenario, SemanticRangesAreChecked) {
  EXPECT_FALSE(error_of("[params]\ncutoff = 1.5\n").empty());
  EXPECT_FALSE(error_of("[params]\ndecrease_factor = 0\n").empty());
  EXPECT_FALSE(error_of("[params]\ncapacity_factor = 1.2\n").empty());
  EXPECT_FALSE(error_of("[router a]\nmean = 0\n").empty());
  EXPECT_FALSE(error_of("[router a]\nmean = 1\n[user u]\npath = a\nstart = -1\n").empty());
  EXPECT_TRUE(error_of("[params]\ncapacity_factor = 1\n").empty());
}

TEST(Scenario, RenderParsesBackIdentically) {
  for (const char* name : {"case1", "case2", "mm1"}) {
    auto s = decbit::load_scenario(bundled(name));
    auto text = decbit::render_scenario(s);
    EXPECT_EQ(decbit::parse_scenario(text), s) << name;
    EXPECT_EQ(decbit::render_scenario(decbit::parse_scenario(text)), text) << name;
  }
}

TEST(Scenario, RandomScenariosRoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    Scenario s;
    s.name = "rand" + std::to_string(trial);
    std::size_t nr = 1 + rng() % 4;
    for (std::size_t r = 0; r < nr; ++r) {
      decbit::ServerSpec spec;
      spec.name = "r" + std::to_string(r);
      spec.distribution = rng() % 2 ? decbit::ServiceDistribution::kExponential
                                    : decbit::ServiceDistribution::kDeterministic;
      spec.mean_service_time = pos(rng);
      spec.propagation_delay = rng() % 2 ? pos(rng) : 0.0;
      s.routers.push_back(spec);
    }
    std::size_t nu = rng() % 4;
    for (std::size_t u = 0; u < nu; ++u) {
      decbit::UserSpec spec;
      spec.name = "u" + std::to_string(u);
      spec.path.push_back(s.routers[rng() % nr].name);
      spec.start_time = pos(rng);
      if (u > 0 && rng() % 2) spec.start_after = decbit::StartAfter{"u0", rng() % 500};
      if (rng() % 2) spec.packet_budget = rng() % 1000;
      if (rng() % 2) spec.w_max = 1 + static_cast<int>(rng() % 40);
      if (rng() % 2) spec.window = 1 + static_cast<int>(rng() % 40);
      s.users.push_back(spec);
    }
    s.run.end_time = pos(rng) * 100;
    s.run.seed = rng();
    s.run.explicit_ack = rng() % 2;
    s.run.ack_delay = pos(rng);
    s.run.warmup_fraction = 0.3;
    s.params.cutoff = 0.3;
    s.params.table_size = rng() % 3;
    decbit::validate(s);
    EXPECT_EQ(decbit::parse_scenario(decbit::render_scenario(s)), s);
  }
}

TEST(Scenario, Overrides) {
  auto s = decbit::load_scenario(bundled("case1"));
  decbit::apply_override(s, "cutoff=0.6");
  decbit::apply_override(s, "run.end_time=500");
  decbit::apply_override(s, "params.table_size=16");
  EXPECT_EQ(s.params.cutoff, 0.6);
  EXPECT_EQ(s.run.end_time, 500);
  EXPECT_EQ(s.params.table_size, 16u);
  EXPECT_THROW(decbit::apply_override(s, "nonsense=1"), ConfigError);
  EXPECT_THROW(decbit::apply_override(s, "cutoff"), ConfigError);
}

TEST(Scenario, DefaultWindowMaxIsTwicePipe) {
  auto s = decbit::load_scenario(bundled("case1"));
  // Round trip 77.5 over bottleneck service 5 gives a pipe of 15.5.
  EXPECT_EQ(decbit::default_window_max(s, 0), 31);
}

TEST(Trace, CsvRoundTrip) {
  std::vector<decbit::TraceRecord> recs(3);
  recs[0] = {0.0, 0, decbit::TraceEvent::kStart, 1, 1};
  recs[1] = {0.1, 1, decbit::TraceEvent::kSend, 2.375, 2, 7};
  recs[2] = {1.0 / 3.0, 0, decbit::TraceEvent::kDepart, 1, 1, 3, true, 1, 4, 1.2345678901234};
  decbit::TraceHeader h;
  h.scenario = "t";
  h.seed = 42;
  h.end_time = 10;
  std::stringstream ss;
  decbit::write_trace_csv(ss, h, {"a", "b"}, {"x", "y"}, recs);
  auto parsed = decbit::read_trace_csv(ss);
  EXPECT_EQ(parsed.header.scenario, "t");
  EXPECT_EQ(parsed.header.seed, 42u);
  EXPECT_EQ(parsed.header.rng, "mt19937_64");
  EXPECT_EQ(parsed.user_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parsed.router_names, (std::vector<std::string>{"y"}));
  ASSERT_EQ(parsed.records.size(), 3u);
  EXPECT_EQ(parsed.records[0], recs[0]);
  EXPECT_EQ(parsed.records[1], recs[1]);
  auto back = parsed.records[2];
  back.router = 1;  // names are renumbered by first appearance
  EXPECT_EQ(back.time, recs[2].time);
  EXPECT_EQ(back.avg_qlen, recs[2].avg_qlen);
  EXPECT_TRUE(back.bit);
}

TEST(Trace, MalformedRowsAreRejected) {
  std::stringstream ss("# decbit-trace version=1 scenario=t rng=mt19937_64 seed=1 end_time=1\n"
                       "time,user,event,w,w_used,seq,bit,router,qlen,avg_qlen\n"
                       "0,a,teleport,1,1,,0,,,\n");
  EXPECT_THROW(decbit::read_trace_csv(ss), ConfigError);
}

}  // namespace
