#pragma once

// The federated round loop: broadcast, local training, censoring decisions,
// resource allocation, outage-sampled uplink and stale-copy aggregation.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cefl/allocator.hpp"
#include "cefl/channel.hpp"
#include "cefl/config.hpp"
#include "cefl/fedmath.hpp"
#include "cefl/rng.hpp"
#include "cefl/scheduler.hpp"

namespace cefl {

struct ServerState {
  ModelVector global_model;
  std::vector<ModelVector> copies;   // last received local model per client
  std::vector<ModelVector> anchors;  // global model each copy was trained from
  std::vector<bool> received_ever;
  DiffHistory history;
  std::size_t round = 1;
  std::size_t cumulative_uploads = 0;
};

struct ClientRoundRecord {
  std::size_t client_id = 0;
  bool scheduled = false;
  bool admitted = false;
  bool received = false;
  double gain = 0.0;
  double bandwidth_hz = 0.0;
  double power_w = 0.0;
  double outage_probability = 0.0;
};

struct RoundTrace {
  std::size_t round = 0;
  double loss = 0.0;              // f(w^{t+1}) after aggregation
  std::optional<double> gap;      // loss - f*, when the oracle converged
  std::size_t scheduled = 0;      // clients whose censoring test fired
  std::size_t uploads_attempted = 0;  // clients that transmitted
  std::size_t uploads_received = 0;
  std::size_t outages = 0;
  std::vector<std::size_t> admitted;
  double bandwidth_used_hz = 0.0;
  double participation_pct = 0.0;
  std::size_t cumulative_uploads = 0;
  double rho = 0.0;  // (mu/L) sum over transmitting clients of D_i (1 - p_i) / D
  std::vector<ClientRoundRecord> clients;
};

/// Everything about a simulation that does not change between rounds.
struct Federation {
  std::vector<ClientDataset> datasets;
  std::vector<double> weights;  // D_i / D
  LossSpec loss;
  std::vector<double> distances_m;
  ChannelParams channel;
  ResourceBudget budget;
  CensorConfig censor;
  Algorithm algorithm = Algorithm::Cefl;
  StaleCopyRule stale_copy = StaleCopyRule::Frozen;
  bool outage = true;
  int local_epochs = 1;
  double eta = 1.0;
  SmoothnessConstants constants;
  std::optional<double> f_star;
  RngStreams rng;

  std::size_t size() const { return datasets.size(); }
};

struct Receipt {
  std::size_t client_id = 0;
  ModelVector model;
};

/// sum_i weights[i] * copies[i], accumulated in index order.
ModelVector aggregate(std::span<const ModelVector> copies, std::span<const double> weights);

/// Replaces the copy (and its anchor, set to the current global model) of
/// every receipt client. Throws InvalidInput on duplicate or unknown ids.
ServerState apply_receipts(ServerState state, std::span<const Receipt> receipts);

/// Copies as the aggregator sees them under the given stale-copy rule.
std::vector<ModelVector> effective_copies(const ServerState& state, StaleCopyRule rule);

/// Initial server and client state at w = 0.
ServerState initial_server_state(const Federation& fed);
std::vector<ClientCache> initial_client_caches(const Federation& fed, const ModelVector& w);

/// One communication round. Advances `state` and `caches` in place.
RoundTrace run_round(const Federation& fed, ServerState& state, std::vector<ClientCache>& caches);

/// Builds datasets, placement and constants for a configuration.
Federation build_federation(const SimConfig& config);

struct SimulationResult {
  std::vector<RoundTrace> traces;
  double initial_loss = 0.0;
  std::optional<double> initial_gap;
  std::optional<double> f_star;
  SmoothnessConstants constants;
  double eta = 0.0;
  std::vector<double> weights;
};

/// Runs config.rounds rounds, or fewer when target_gap is reached.
SimulationResult run_simulation(const SimConfig& config);

/// Same configuration with algorithm forced to fedavg-uniform.
SimulationResult run_fedavg_baseline(SimConfig config);

/// Owns a federation and its evolving state; steps one round at a time.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config);
  explicit Simulation(Federation federation);

  const Federation& federation() const { return fed_; }
  const ServerState& state() const { return state_; }
  const std::vector<ClientCache>& caches() const { return caches_; }

  RoundTrace step();

 private:
  Federation fed_;
  ServerState state_;
  std::vector<ClientCache> caches_;
};

}  // namespace cefl
