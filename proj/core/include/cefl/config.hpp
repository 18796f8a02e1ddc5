#pragma once

// Simulation configuration and its flat `key = value` text format. Physical
// keys carry their unit in the name (bandwidth_hz, pmax_dbm, ...). dB values
// are kept as written and converted to linear SI units by budget() and
// channel().

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cefl/allocator.hpp"
#include "cefl/channel.hpp"
#include "cefl/fedmath.hpp"

namespace cefl {

enum class Algorithm { Cefl, FedAvgUniform, CeflUniform };
enum class PartitionMode { Iid, LabelShards };
enum class EtaMode { InverseL, Explicit };

/// How the server treats the copy of a client whose fresh model did not
/// arrive this round.
///   Frozen:  the stored local model is reused as is.
///   Rebased: the stored local update (copy minus the model it was trained
///            from) is reapplied to the current global model.
enum class StaleCopyRule { Frozen, Rebased };

struct SimConfig {
  std::uint64_t seed = 1;
  std::size_t clients = 10;
  std::size_t dimension = 20;
  std::size_t samples_per_client = 20;

  LossKind loss = LossKind::Ridge;
  double lambda = 0.1;
  double label_noise = 0.1;
  PartitionMode partition = PartitionMode::Iid;
  std::size_t shards_per_client = 2;

  EtaMode eta_mode = EtaMode::InverseL;
  double eta = 0.0;  // used when eta_mode == Explicit
  int local_epochs = 1;

  std::size_t censor_window = 10;
  double censor_intensity = 0.8;
  std::optional<std::vector<double>> censor_delta;  // overrides the intensity rule
  int staleness_limit = 50;

  double bandwidth_hz = 20e6;
  double pmin_dbm = 0.0;
  double pmax_dbm = 20.0;
  double deadline_s = 5e-5;
  std::optional<double> packet_bits;  // default: 32 bits per coordinate

  double carrier_hz = 3e9;
  double pathloss_exponent = 2.9;
  double noise_psd_dbm_per_hz = -174.0;
  double fading_variance = 1.0;
  double inner_radius_m = 10.0;
  double outer_radius_m = 500.0;
  bool outage = true;

  std::size_t rounds = 200;
  std::optional<double> target_gap;  // stop early once f(w) - f* <= target_gap

  Algorithm algorithm = Algorithm::Cefl;
  StaleCopyRule stale_copy = StaleCopyRule::Frozen;

  /// Throws ConfigError describing the first invalid field.
  void validate() const;

  double packet_size_bits() const;
  ResourceBudget budget() const;
  ChannelParams channel() const;

  bool operator==(const SimConfig&) const = default;
};

SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const SimConfig& config);

std::string_view to_string(Algorithm a);
std::string_view to_string(PartitionMode m);
std::string_view to_string(StaleCopyRule r);
Algorithm parse_algorithm(std::string_view s);

}  // namespace cefl
