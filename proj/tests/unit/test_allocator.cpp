#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "cefl/allocator.hpp"
#include "cefl/error.hpp"

using namespace cefl;

namespace {

const ChannelParams kChannel;
const double kN0 = kChannel.noise_psd_w_per_hz;

std::vector<ChannelRealization> random_clients(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(10.0, 500.0);
  std::vector<ChannelRealization> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_gain(rng, i, dist(rng), kChannel));
  return out;
}

double tau(const Allocation& a, double gain, const ResourceBudget& b) {
  return comm_time(b.packet_bits, achievable_rate(a.bandwidth_hz, a.power_w, gain, kN0));
}

}  // namespace

TEST(RequiredBandwidth, InfeasibleAtExactCapacity) {
  const double p = 0.1, g = 1e-11;
  const double capacity = p * g / (kN0 * std::numbers::ln2);
  EXPECT_FALSE(required_bandwidth(p, g, kN0, capacity, 1.0).has_value());
  EXPECT_TRUE(required_bandwidth(p, g, kN0, 0.5 * capacity, 1.0).has_value());
}

TEST(RequiredBandwidth, MeetsDeadlineExactly) {
  std::mt19937_64 rng(1);
  for (const auto& c : random_clients(rng, 200)) {
    const auto b = required_bandwidth(0.1, c.gain, kN0, 640.0, 5e-5);
    if (!b) continue;
    EXPECT_NEAR(achievable_rate(*b, 0.1, c.gain, kN0) * 5e-5, 640.0, 1e-8 * 640.0);
  }
}

TEST(RequiredBandwidth, RejectsNonPositiveInputs) {
  EXPECT_THROW(required_bandwidth(0.0, 1e-10, kN0, 640.0, 5e-5), InvalidInput);
  EXPECT_THROW(required_bandwidth(0.1, 0.0, kN0, 640.0, 5e-5), InvalidInput);
}

TEST(RequiredBandwidth, MatchesGridScan) {
  // First point of a 1e7-point grid over [0, 20 MHz] that meets the rate target.
  const double gains[] = {pathloss(60.0, kChannel), pathloss(250.0, kChannel) * 0.7,
                          pathloss(400.0, kChannel) * 2.5};
  const double target = 640.0 / 5e-5;
  const int points = 10'000'000;
  const double cell = 20e6 / points;
  for (double g : gains) {
    const auto b = required_bandwidth(0.1, g, kN0, 640.0, 5e-5);
    ASSERT_TRUE(b.has_value());
    int first = -1;
    for (int k = 1; k <= points; ++k) {
      if (achievable_rate(k * cell, 0.1, g, kN0) >= target) {
        first = k;
        break;
      }
    }
    ASSERT_GT(first, 0);
    EXPECT_LE(std::abs(*b - first * cell), cell);
  }
}

TEST(LinearSearch, SingleFeasibleClientAdmitted) {
  ResourceBudget budget;
  const std::vector<ChannelRealization> one{{0, 50.0, pathloss(50.0, kChannel)}};
  const auto plan = linear_search_allocate(one, budget, kN0);
  ASSERT_EQ(plan.entries.size(), 1u);
  EXPECT_TRUE(plan.entries[0].admitted);
  EXPECT_EQ(plan.entries[0].power_w, budget.power_max_w);
}

TEST(LinearSearch, ZeroBudgetAdmitsNobody) {
  ResourceBudget budget;
  budget.total_bandwidth_hz = 0.0;
  std::mt19937_64 rng(2);
  const auto plan = linear_search_allocate(random_clients(rng, 6), budget, kN0);
  EXPECT_EQ(plan.admitted_count(), 0u);
  for (const auto& a : plan.entries) {
    EXPECT_EQ(a.bandwidth_hz, 0.0);
    EXPECT_EQ(a.power_w, 0.0);
  }
}

TEST(LinearSearch, EmptyInputGivesEmptyPlan) {
  EXPECT_TRUE(linear_search_allocate({}, ResourceBudget{}, kN0).entries.empty());
}

TEST(LinearSearch, MatchesBruteForceOnFiveClients) {
  ResourceBudget budget;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    const auto clients = random_clients(rng, 5);
    EXPECT_EQ(linear_search_allocate(clients, budget, kN0).admitted_count(),
              brute_force_allocate(clients, budget, kN0).admitted_count());
  }
}

TEST(LinearSearch, PlanInvariants) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick_n(1, 8);
  std::uniform_real_distribution<double> pick_b(1e6, 40e6);
  for (int trial = 0; trial < 500; ++trial) {
    ResourceBudget budget;
    budget.total_bandwidth_hz = pick_b(rng);
    const auto clients = random_clients(rng, pick_n(rng));
    const auto plan = linear_search_allocate(clients, budget, kN0);
    ASSERT_EQ(plan.entries.size(), clients.size());
    EXPECT_LE(plan.bandwidth_used(), budget.total_bandwidth_hz * (1 + kBudgetTolerance));

    // Admitted clients form a prefix of the gain-descending order among
    // capacity-feasible clients.
    std::vector<std::size_t> order(clients.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) {
      return clients[a].gain != clients[b].gain ? clients[a].gain > clients[b].gain : a < b;
    });
    bool closed = false;
    for (auto k : order) {
      const bool feasible =
          required_bandwidth(budget.power_max_w, clients[k].gain, kN0, budget.packet_bits,
                             budget.deadline_s)
              .has_value();
      if (!feasible) {
        EXPECT_FALSE(plan.entries[k].admitted);
        continue;
      }
      if (closed) EXPECT_FALSE(plan.entries[k].admitted);
      if (!plan.entries[k].admitted) closed = true;
    }

    for (std::size_t k = 0; k < clients.size(); ++k) {
      const auto& a = plan.entries[k];
      if (a.admitted) {
        EXPECT_GE(a.power_w, budget.power_min_w);
        EXPECT_LE(a.power_w, budget.power_max_w);
        EXPECT_NEAR(tau(a, clients[k].gain, budget), budget.deadline_s, 1e-6 * budget.deadline_s);
      } else {
        EXPECT_EQ(a.bandwidth_hz, 0.0);
        EXPECT_EQ(a.power_w, 0.0);
      }
    }
  }
}

TEST(LinearSearch, MonotoneInBudget) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto clients = random_clients(rng, 8);
    std::size_t last = 0;
    for (double b = 0.0; b <= 60e6; b += 2e6) {
      ResourceBudget budget;
      budget.total_bandwidth_hz = b;
      const std::size_t count = linear_search_allocate(clients, budget, kN0).admitted_count();
      EXPECT_GE(count, last);
      last = count;
    }
  }
}

TEST(LinearSearch, TiesBrokenByAscendingId) {
  ResourceBudget budget;
  const double g = pathloss(100.0, kChannel);
  const auto need = *required_bandwidth(budget.power_max_w, g, kN0, budget.packet_bits,
                                        budget.deadline_s);
  budget.total_bandwidth_hz = 1.5 * need;  // room for one
  const std::vector<ChannelRealization> tied{{7, 100.0, g}, {3, 100.0, g}};
  const auto plan = linear_search_allocate(tied, budget, kN0);
  EXPECT_EQ(plan.admitted_ids(), std::vector<std::size_t>{3});
}

TEST(LinearSearch, SkipsCapacityInfeasibleClients) {
  ResourceBudget budget;
  const std::vector<ChannelRealization> clients{
      {0, 100.0, pathloss(100.0, kChannel)},
      {1, 500.0, 1e-30},  // can never meet the deadline
      {2, 120.0, pathloss(120.0, kChannel)}};
  const auto plan = linear_search_allocate(clients, budget, kN0);
  EXPECT_FALSE(plan.find(1)->admitted);
  EXPECT_TRUE(plan.find(0)->admitted);
  EXPECT_TRUE(plan.find(2)->admitted);
}

TEST(BruteForce, EmptyAndInfeasible) {
  ResourceBudget budget;
  EXPECT_TRUE(brute_force_allocate({}, budget, kN0).entries.empty());
  const std::vector<ChannelRealization> hopeless{{0, 500.0, 1e-30}, {1, 500.0, 1e-31}};
  EXPECT_EQ(brute_force_allocate(hopeless, budget, kN0).admitted_count(), 0u);
  EXPECT_EQ(linear_search_allocate(hopeless, budget, kN0).admitted_count(), 0u);
}

TEST(BruteForce, AtLeastGreedyOnSixClients) {
  ResourceBudget budget;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto clients = random_clients(rng, 6);
    const auto exact = brute_force_allocate(clients, budget, kN0).admitted_count();
    const auto greedy = linear_search_allocate(clients, budget, kN0).admitted_count();
    EXPECT_GE(exact, greedy);
    EXPECT_EQ(exact, greedy);
  }
}

TEST(BruteForce, SizeGuard) {
  std::mt19937_64 rng(6);
  EXPECT_THROW(brute_force_allocate(random_clients(rng, 17), ResourceBudget{}, kN0),
               InvalidInput);
}

TEST(UniformAllocate, EqualShareAtMaxPower) {
  ResourceBudget budget;
  std::mt19937_64 rng(7);
  const auto clients = random_clients(rng, 4);
  const auto plan = uniform_allocate(clients, budget, 10);
  ASSERT_EQ(plan.admitted_count(), 4u);
  for (const auto& a : plan.entries) {
    EXPECT_DOUBLE_EQ(a.bandwidth_hz, 2e6);
    EXPECT_DOUBLE_EQ(a.power_w, budget.power_max_w);
  }
}

TEST(ResourceBudget, Validate) {
  ResourceBudget b;
  b.power_min_w = 1.0;
  b.power_max_w = 0.5;
  EXPECT_THROW(b.validate(), InvalidInput);
  ResourceBudget c;
  c.deadline_s = 0.0;
  EXPECT_THROW(c.validate(), InvalidInput);
}
