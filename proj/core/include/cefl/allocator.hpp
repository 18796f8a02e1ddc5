#pragma once

// Per-round admission and bandwidth/power allocation among scheduled
// clients: the greedy linear-search allocator, an exhaustive-subset oracle,
// and the equal-share benchmark allocation.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cefl/channel.hpp"

namespace cefl {

struct ResourceBudget {
  double total_bandwidth_hz = 20e6;
  double power_min_w = 1e-3;
  double power_max_w = 0.1;
  double deadline_s = 5e-5;
  double packet_bits = 640.0;

  void validate() const;
};

struct Allocation {
  std::size_t client_id = 0;
  bool admitted = false;
  double bandwidth_hz = 0.0;
  double power_w = 0.0;
};

/// One entry per scheduled client, in the order the clients were given.
struct AllocationPlan {
  std::vector<Allocation> entries;

  std::size_t admitted_count() const;
  double bandwidth_used() const;
  std::vector<std::size_t> admitted_ids() const;
  const Allocation* find(std::size_t client_id) const;
};

/// Relative slack on the cumulative bandwidth check, so that bisection
/// rounding never flips a feasible admission.
inline constexpr double kBudgetTolerance = 1e-12;

/// Largest instance brute_force_allocate accepts.
inline constexpr std::size_t kBruteForceLimit = 16;

/// Smallest B with B log2(1 + P g / (B N0)) >= S / Gamma, found by bisection.
/// Empty when the asymptotic capacity P g / (N0 ln 2) does not exceed S / Gamma.
std::optional<double> required_bandwidth(double power_w, double gain, double noise_psd_w_per_hz,
                                         double packet_bits, double deadline_s);

/// Visits clients by descending gain (ties: ascending id), gives each P_max
/// and exactly deadline-meeting bandwidth, and stops at the first client that
/// no longer fits the remaining budget. Capacity-infeasible clients are
/// skipped without stopping.
AllocationPlan linear_search_allocate(std::span<const ChannelRealization> scheduled,
                                      const ResourceBudget& budget, double noise_psd_w_per_hz);

/// Maximum-cardinality feasible subset by enumeration (ties: lexicographically
/// smallest sorted id list). Throws InvalidInput above kBruteForceLimit clients.
AllocationPlan brute_force_allocate(std::span<const ChannelRealization> scheduled,
                                    const ResourceBudget& budget, double noise_psd_w_per_hz);

/// Every scheduled client transmits with B / population and P_max.
AllocationPlan uniform_allocate(std::span<const ChannelRealization> scheduled,
                                const ResourceBudget& budget, std::size_t population);

}  // namespace cefl
