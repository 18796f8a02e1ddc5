#pragma once

// Single allocator instance read from a key = value file:
//
//   bandwidth_hz = 20e6
//   pmin_dbm = 0
//   pmax_dbm = 20
//   deadline_s = 5e-5
//   packet_bits = 640
//   noise_psd_dbm_per_hz = -174
//   client = <id> <gain>          # linear |h|^2, repeatable
//   client_at = <id> <distance_m> # gain from pathloss with unit fading
//
// Unlisted keys keep the simulation defaults.

#include <filesystem>
#include <vector>

#include "cefl/allocator.hpp"
#include "cefl/channel.hpp"

struct AllocationInstance {
  cefl::ResourceBudget budget;
  double noise_psd_w_per_hz = cefl::dbm_to_watts(-174.0);
  std::vector<cefl::ChannelRealization> clients;
};

/// Throws cefl::ConfigError on malformed input.
AllocationInstance load_instance(const std::filesystem::path& path);
