#include "cefl/allocator.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "cefl/error.hpp"

namespace cefl {

void ResourceBudget::validate() const {
  if (!(total_bandwidth_hz >= 0.0)) throw InvalidInput("total bandwidth must be non-negative");
  if (!(power_min_w >= 0.0) || !(power_max_w >= power_min_w)) {
    throw InvalidInput("power limits must satisfy 0 <= P_min <= P_max");
  }
  if (!(deadline_s > 0.0)) throw InvalidInput("deadline must be positive");
  if (!(packet_bits > 0.0)) throw InvalidInput("packet size must be positive");
}

std::size_t AllocationPlan::admitted_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const Allocation& a) { return a.admitted; }));
}

double AllocationPlan::bandwidth_used() const {
  double total = 0.0;
  for (const auto& a : entries) total += a.bandwidth_hz;
  return total;
}

std::vector<std::size_t> AllocationPlan::admitted_ids() const {
  std::vector<std::size_t> ids;
  for (const auto& a : entries) {
    if (a.admitted) ids.push_back(a.client_id);
  }
  return ids;
}

const Allocation* AllocationPlan::find(std::size_t client_id) const {
  for (const auto& a : entries) {
    if (a.client_id == client_id) return &a;
  }
  return nullptr;
}

std::optional<double> required_bandwidth(double power_w, double gain, double noise_psd_w_per_hz,
                                         double packet_bits, double deadline_s) {
  if (!(power_w > 0.0) || !(gain > 0.0)) {
    throw InvalidInput("required_bandwidth needs positive power and gain");
  }
  if (!(packet_bits > 0.0) || !(deadline_s > 0.0) || !(noise_psd_w_per_hz > 0.0)) {
    throw InvalidInput("required_bandwidth needs positive packet size, deadline and noise");
  }
  const double target = packet_bits / deadline_s;
  const double capacity = power_w * gain / (noise_psd_w_per_hz * std::numbers::ln2);
  if (capacity <= target) return std::nullopt;

  auto rate = [&](double b) { return achievable_rate(b, power_w, gain, noise_psd_w_per_hz); };

  double lo = 0.0;
  double hi = target;
  while (rate(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::nullopt;
  }
  // Invariant: rate(lo) < target <= rate(hi).
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (rate(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

AllocationPlan linear_search_allocate(std::span<const ChannelRealization> scheduled,
                                      const ResourceBudget& budget, double noise_psd_w_per_hz) {
  budget.validate();
  AllocationPlan plan;
  plan.entries.reserve(scheduled.size());
  for (const auto& c : scheduled) plan.entries.push_back({c.client_id, false, 0.0, 0.0});

  std::vector<std::size_t> order(scheduled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scheduled[a].gain != scheduled[b].gain) return scheduled[a].gain > scheduled[b].gain;
    return scheduled[a].client_id < scheduled[b].client_id;
  });

  const double limit = budget.total_bandwidth_hz * (1.0 + kBudgetTolerance);
  double used = 0.0;
  for (const std::size_t k : order) {
    if (!(scheduled[k].gain > 0.0)) continue;
    const auto need = required_bandwidth(budget.power_max_w, scheduled[k].gain,
                                         noise_psd_w_per_hz, budget.packet_bits,
                                         budget.deadline_s);
    if (!need) continue;
    if (used + *need > limit) break;
    used += *need;
    plan.entries[k] = {scheduled[k].client_id, true, *need, budget.power_max_w};
  }
  return plan;
}

AllocationPlan brute_force_allocate(std::span<const ChannelRealization> scheduled,
                                    const ResourceBudget& budget, double noise_psd_w_per_hz) {
  budget.validate();
  const std::size_t n = scheduled.size();
  if (n > kBruteForceLimit) {
    throw InvalidInput("brute_force_allocate supports at most " +
                       std::to_string(kBruteForceLimit) + " clients");
  }
  std::vector<std::optional<double>> need(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (scheduled[k].gain > 0.0) {
      need[k] = required_bandwidth(budget.power_max_w, scheduled[k].gain, noise_psd_w_per_hz,
                                   budget.packet_bits, budget.deadline_s);
    }
  }

  auto sorted_ids = [&](std::uint32_t mask) {
    std::vector<std::size_t> ids;
    for (std::size_t k = 0; k < n; ++k) {
      if (mask & (1u << k)) ids.push_back(scheduled[k].client_id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };

  const double limit = budget.total_bandwidth_hz * (1.0 + kBudgetTolerance);
  std::uint32_t best = 0;
  std::size_t best_size = 0;
  std::vector<std::size_t> best_ids;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size < best_size) continue;
    double total = 0.0;
    bool feasible = true;
    for (std::size_t k = 0; k < n && feasible; ++k) {
      if (!(mask & (1u << k))) continue;
      if (!need[k]) {
        feasible = false;
      } else {
        total += *need[k];
      }
    }
    if (!feasible || total > limit) continue;
    auto ids = sorted_ids(mask);
    if (size > best_size || ids < best_ids) {
      best = mask;
      best_size = size;
      best_ids = std::move(ids);
    }
  }

  AllocationPlan plan;
  plan.entries.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (best & (1u << k)) {
      plan.entries.push_back({scheduled[k].client_id, true, *need[k], budget.power_max_w});
    } else {
      plan.entries.push_back({scheduled[k].client_id, false, 0.0, 0.0});
    }
  }
  return plan;
}

AllocationPlan uniform_allocate(std::span<const ChannelRealization> scheduled,
                                const ResourceBudget& budget, std::size_t population) {
  budget.validate();
  if (population == 0) throw InvalidInput("uniform allocation needs a positive population");
  const double share = budget.total_bandwidth_hz / static_cast<double>(population);
  AllocationPlan plan;
  plan.entries.reserve(scheduled.size());
  for (const auto& c : scheduled) {
    const bool transmits = share > 0.0 && budget.power_max_w > 0.0;
    plan.entries.push_back({c.client_id, transmits, transmits ? share : 0.0,
                            transmits ? budget.power_max_w : 0.0});
  }
  return plan;
}

}  // namespace cefl
