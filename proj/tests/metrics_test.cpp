#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "decbit/errors.hpp"
#include "decbit/metrics.hpp"
#include "support/oracles.hpp"

namespace m = decbit::metrics;

namespace {

double fi(std::vector<double> x) { return m::fairness_index(x); }

TEST(FairnessIndex, HandValues) {
  EXPECT_DOUBLE_EQ(fi({1, 1, 1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(fi({1, 0, 0, 0}), 0.25);
  EXPECT_DOUBLE_EQ(fi({4, 2}), 0.9);
  EXPECT_DOUBLE_EQ(fi({7}), 1.0);
}

TEST(FairnessIndex, RejectsDegenerateInput) {
  EXPECT_THROW(fi({}), decbit::DomainError);
  EXPECT_THROW(fi({0, 0}), decbit::DomainError);
  EXPECT_THROW(fi({1, -1}), decbit::DomainError);
}

TEST(FairnessIndex, RandomVectorsStayInBoundsAndScaleFree) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(0.0, 10.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t n = 1 + rng() % 12;
    std::vector<double> x(n);
    for (auto& v : x) v = val(rng);
    double f = m::fairness_index(x);
    EXPECT_GE(f, 1.0 / n - 1e-12);
    EXPECT_LE(f, 1.0 + 1e-12);
    double c = scale(rng);
    std::vector<double> y(x);
    for (auto& v : y) v *= c;
    EXPECT_NEAR(m::fairness_index(y), f, 1e-12);
  }
}

TEST(Power, Examples) {
  EXPECT_DOUBLE_EQ(m::power(0.2, 5), 0.04);
  EXPECT_DOUBLE_EQ(m::power(0.0, 5), 0.0);
  EXPECT_NEAR(m::power(0.2, 5, 2), 0.008, 1e-15);
  EXPECT_THROW(m::power(0.2, 0), decbit::DomainError);
  EXPECT_THROW(m::power(-0.1, 1), decbit::DomainError);
}

TEST(Efficiency, Examples) {
  EXPECT_DOUBLE_EQ(m::efficiency(0.04, 0.04), 1.0);
  EXPECT_DOUBLE_EQ(m::efficiency(0.02, 0.04), 0.5);
  EXPECT_DOUBLE_EQ(m::efficiency(0.0, 0.04), 0.0);
  EXPECT_THROW(m::efficiency(0.01, 0.0), decbit::DomainError);
}

TEST(KneeFromSweep, PicksMaximumPower) {
  std::vector<m::SweepPoint> pts{{1, 0.10, 10}, {2, 0.15, 20}};
  auto k = m::knee_from_sweep(pts);
  EXPECT_EQ(k.window, 1);
  EXPECT_DOUBLE_EQ(k.power, 0.01);

  std::vector<m::SweepPoint> one{{3, 0.2, 4}};
  EXPECT_EQ(m::knee_from_sweep(one).window, 3);
  EXPECT_THROW(m::knee_from_sweep(std::vector<m::SweepPoint>{}), decbit::DomainError);
}

TEST(KneeFromSweep, TiesGoToSmallerWindowInAnyOrder) {
  std::vector<m::SweepPoint> pts{{8, 0.2, 10}, {4, 0.1, 5}, {6, 0.05, 10}};
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(m::knee_from_sweep(pts).window, 4);
    std::next_permutation(pts.begin(), pts.end(),
                          [](auto& a, auto& b) { return a.window < b.window; });
  }
}

TEST(MaxMin, SingleResourceSplitsEqually) {
  m::ResourceGraph g{{0.2}, {{0}, {0}}, {}};
  auto a = m::max_min_fair_allocation(g);
  EXPECT_DOUBLE_EQ(a.allocations[0], 0.1);
  EXPECT_DOUBLE_EQ(a.allocations[1], 0.1);
  EXPECT_EQ(a.bottleneck_of_user[0], 0u);
}

TEST(MaxMin, SoleClaimantTakesEverything) {
  m::ResourceGraph g{{3.5}, {{0}}, {}};
  EXPECT_DOUBLE_EQ(m::max_min_fair_allocation(g).allocations[0], 3.5);
}

TEST(MaxMin, TwoResourceChain) {
  m::ResourceGraph g{{10, 4}, {{0}, {0, 1}, {1}}, {}};
  auto a = m::max_min_fair_allocation(g);
  EXPECT_DOUBLE_EQ(a.allocations[0], 8);
  EXPECT_DOUBLE_EQ(a.allocations[1], 2);
  EXPECT_DOUBLE_EQ(a.allocations[2], 2);
  EXPECT_EQ(a.bottleneck_of_user[0], 0u);
  EXPECT_EQ(a.bottleneck_of_user[1], 1u);
}

TEST(MaxMin, DemandCapsFreeCapacity) {
  m::ResourceGraph g{{1.0}, {{0}, {0}, {0}}, {0.1, std::nullopt, std::nullopt}};
  auto a = m::max_min_fair_allocation(g);
  EXPECT_NEAR(a.allocations[0], 0.1, 1e-12);
  EXPECT_NEAR(a.allocations[1], 0.45, 1e-12);
  EXPECT_NEAR(a.allocations[2], 0.45, 1e-12);
  EXPECT_FALSE(a.bottleneck_of_user[0].has_value());
}

TEST(MaxMin, UnknownResourceIsConfigError) {
  m::ResourceGraph g{{1.0}, {{1}}, {}};
  EXPECT_THROW(m::max_min_fair_allocation(g), decbit::ConfigError);
}

TEST(MaxMin, FeasibleAndEveryUserHasSaturatedBottleneck) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> cap(0.5, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t nr = 1 + rng() % 5;
    std::size_t nu = 1 + rng() % 6;
    m::ResourceGraph g;
    for (std::size_t r = 0; r < nr; ++r) g.capacities.push_back(cap(rng));
    for (std::size_t u = 0; u < nu; ++u) {
      std::vector<std::size_t> path;
      for (std::size_t r = 0; r < nr; ++r) {
        if (rng() % 2) path.push_back(r);
      }
      if (path.empty()) path.push_back(rng() % nr);
      g.user_paths.push_back(path);
    }
    auto a = m::max_min_fair_allocation(g);
    std::vector<double> load(nr, 0.0);
    for (std::size_t u = 0; u < nu; ++u) {
      for (auto r : g.user_paths[u]) load[r] += a.allocations[u];
    }
    for (std::size_t r = 0; r < nr; ++r) EXPECT_LE(load[r], g.capacities[r] * (1 + 1e-9));
    // Bottleneck: saturated, and the user is among the largest on it.
    for (std::size_t u = 0; u < nu; ++u) {
      ASSERT_TRUE(a.bottleneck_of_user[u].has_value());
      auto b = *a.bottleneck_of_user[u];
      EXPECT_NEAR(load[b], g.capacities[b], 1e-9 * g.capacities[b]);
      for (std::size_t v = 0; v < nu; ++v) {
        if (std::find(g.user_paths[v].begin(), g.user_paths[v].end(), b) !=
            g.user_paths[v].end()) {
          EXPECT_LE(a.allocations[v], a.allocations[u] + 1e-9);
        }
      }
    }
  }
}

TEST(MaxMin, MatchesGridOracleOnSmallGraphs) {
  const double step = 1.0 / 12.0;
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t nr = 1 + rng() % 3;
    std::size_t nu = 1 + rng() % 3;
    m::ResourceGraph g;
    for (std::size_t r = 0; r < nr; ++r) g.capacities.push_back(1.0 + rng() % 3);
    for (std::size_t u = 0; u < nu; ++u) {
      unsigned mask = 1 + rng() % ((1u << nr) - 1);
      std::vector<std::size_t> path;
      for (std::size_t r = 0; r < nr; ++r) {
        if (mask & (1u << r)) path.push_back(r);
      }
      g.user_paths.push_back(path);
    }
    auto got = oracle::sorted(m::max_min_fair_allocation(g).allocations);
    auto want = oracle::sorted(oracle::grid_max_min(g, step));
    for (std::size_t i = 0; i < nu; ++i) EXPECT_NEAR(got[i], want[i], nu * step);
  }
}

TEST(GlobalFairness, Examples) {
  m::OptimalAllocation opt{{0.1, 0.1}, {0u, 0u}};
  std::vector<double> same{0.1, 0.1};
  EXPECT_DOUBLE_EQ(m::global_fairness(same, opt), 1.0);
  std::vector<double> skew{0.2, 0.0};
  EXPECT_DOUBLE_EQ(m::global_fairness(skew, opt), 0.5);
  std::vector<double> mild{0.12, 0.08};
  EXPECT_NEAR(m::global_fairness(mild, opt), 4.0 / (2 * (1.44 + 0.64)), 1e-12);
}

TEST(GlobalFairness, RejectsZeroOptimum) {
  m::OptimalAllocation opt{{0.1, 0.0}, {0u, 0u}};
  std::vector<double> a{0.1, 0.1};
  EXPECT_THROW(m::global_fairness(a, opt), decbit::DomainError);
  std::vector<double> short_a{0.1};
  EXPECT_THROW(m::global_fairness(short_a, opt), decbit::DomainError);
}

}  // namespace
