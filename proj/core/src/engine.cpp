#include "cefl/engine.hpp"

#include <cmath>
#include <random>
#include <string>

#include "cefl/dataset.hpp"
#include "cefl/error.hpp"

namespace cefl {
namespace {

bool same(const ModelVector& a, const ModelVector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

// Distance uniform between the two ring radii.
double ring_distance(std::mt19937_64& rng, double inner, double outer) {
  if (inner == outer) return inner;
  std::uniform_real_distribution<double> u(inner, outer);
  return u(rng);
}

}  // namespace

ModelVector aggregate(std::span<const ModelVector> copies, std::span<const double> weights) {
  if (copies.empty()) throw InvalidInput("aggregate needs at least one copy");
  if (copies.size() != weights.size()) {
    throw InvalidInput("aggregate: " + std::to_string(copies.size()) + " copies but " +
                       std::to_string(weights.size()) + " weights");
  }
  ModelVector out = ModelVector::Zero(copies.front().size());
  for (std::size_t i = 0; i < copies.size(); ++i) {
    if (copies[i].size() != out.size()) throw InvalidInput("aggregate: copy dimension mismatch");
    if (!(weights[i] > 0.0)) throw InvalidInput("aggregate: weights must be positive");
    out += weights[i] * copies[i];
  }
  return out;
}

ServerState apply_receipts(ServerState state, std::span<const Receipt> receipts) {
  std::vector<bool> seen(state.copies.size(), false);
  for (const auto& r : receipts) {
    if (r.client_id >= state.copies.size()) {
      throw InvalidInput("receipt from unknown client " + std::to_string(r.client_id));
    }
    if (seen[r.client_id]) {
      throw InvalidInput("duplicate receipt for client " + std::to_string(r.client_id));
    }
    if (r.model.size() != state.global_model.size()) {
      throw InvalidInput("receipt model dimension mismatch");
    }
    seen[r.client_id] = true;
  }
  for (const auto& r : receipts) {
    state.copies[r.client_id] = r.model;
    state.anchors[r.client_id] = state.global_model;
    state.received_ever[r.client_id] = true;
  }
  return state;
}

std::vector<ModelVector> effective_copies(const ServerState& state, StaleCopyRule rule) {
  if (rule == StaleCopyRule::Frozen) return state.copies;
  std::vector<ModelVector> out;
  out.reserve(state.copies.size());
  for (std::size_t i = 0; i < state.copies.size(); ++i) {
    if (same(state.anchors[i], state.global_model)) {
      out.push_back(state.copies[i]);
    } else {
      out.push_back(state.global_model + (state.copies[i] - state.anchors[i]));
    }
  }
  return out;
}

ServerState initial_server_state(const Federation& fed) {
  if (fed.datasets.empty()) throw InvalidInput("federation has no clients");
  ServerState s;
  s.global_model = ModelVector::Zero(fed.datasets.front().dimension());
  s.copies.assign(fed.size(), s.global_model);
  s.anchors.assign(fed.size(), s.global_model);
  s.received_ever.assign(fed.size(), false);
  s.history = DiffHistory(fed.censor.K);
  s.round = 1;
  return s;
}

std::vector<ClientCache> initial_client_caches(const Federation& fed, const ModelVector& w) {
  std::vector<ClientCache> caches(fed.size());
  for (std::size_t i = 0; i < fed.size(); ++i) {
    caches[i].stale_model = w;
    caches[i].stale_gradient = local_gradient(w, fed.datasets[i], fed.loss);
    caches[i].clock = 0;
  }
  return caches;
}

RoundTrace run_round(const Federation& fed, ServerState& state, std::vector<ClientCache>& caches) {
  const std::size_t n = fed.size();
  if (caches.size() != n || state.copies.size() != n) {
    throw InvalidInput("state does not match the federation size");
  }
  const std::size_t t = state.round;
  const ModelVector w = state.global_model;  // (1) broadcast

  RoundTrace trace;
  trace.round = t;
  trace.clients.resize(n);

  // (2) fresh gradients and local models
  std::vector<Eigen::VectorXd> grads(n);
  std::vector<ModelVector> local(n);
  for (std::size_t i = 0; i < n; ++i) {
    grads[i] = local_gradient(w, fed.datasets[i], fed.loss);
    local[i] = local_update_from(w, grads[i], fed.datasets[i], fed.loss, fed.eta, fed.local_epochs);
  }

  // (3) scheduling
  for (std::size_t i = 0; i < n; ++i) {
    auto& rec = trace.clients[i];
    rec.client_id = i;
    rec.scheduled = fed.algorithm == Algorithm::FedAvgUniform ||
                    should_upload(grads[i], caches[i], state.history, fed.censor);
    if (rec.scheduled) ++trace.scheduled;
  }

  // (4) channel gains, all clients
  std::vector<ChannelRealization> scheduled;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = fed.rng.stream(StreamPurpose::Fading, i, t);
    const auto real = sample_gain(rng, i, fed.distances_m[i], fed.channel);
    trace.clients[i].gain = real.gain;
    if (trace.clients[i].scheduled) scheduled.push_back(real);
  }

  // (5) allocation
  const AllocationPlan plan =
      fed.algorithm == Algorithm::Cefl
          ? linear_search_allocate(scheduled, fed.budget, fed.channel.noise_psd_w_per_hz)
          : uniform_allocate(scheduled, fed.budget, n);

  // (6) uplink with outage
  std::vector<Receipt> receipts;
  std::vector<bool> received(n, false);
  double rho_sum = 0.0;
  for (const auto& a : plan.entries) {
    if (!a.admitted) continue;
    auto& rec = trace.clients[a.client_id];
    rec.admitted = true;
    rec.bandwidth_hz = a.bandwidth_hz;
    rec.power_w = a.power_w;
    rec.outage_probability =
        fed.outage ? outage_probability(a.bandwidth_hz, a.power_w, fed.distances_m[a.client_id],
                                        fed.channel, fed.budget.packet_bits, fed.budget.deadline_s)
                   : 0.0;
    auto rng = fed.rng.stream(StreamPurpose::Outage, a.client_id, t);
    rec.received = sample_transmission(rng, rec.outage_probability);
    rho_sum += fed.weights[a.client_id] * (1.0 - rec.outage_probability);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = trace.clients[i];
    if (!rec.admitted) continue;
    trace.admitted.push_back(i);
    ++trace.uploads_attempted;
    trace.bandwidth_used_hz += rec.bandwidth_hz;
    if (rec.received) {
      ++trace.uploads_received;
      received[i] = true;
      receipts.push_back({i, local[i]});
    } else {
      ++trace.outages;
    }
  }
  trace.rho = fed.constants.mu / fed.constants.L * rho_sum;

  // (7) receipts, (8) aggregation
  state = apply_receipts(std::move(state), receipts);
  const auto copies = effective_copies(state, fed.stale_copy);
  ModelVector next = aggregate(copies, fed.weights);

  // (9) history
  state.history = push_history(std::move(state.history), next, w);

  // (10) client caches and clocks
  for (std::size_t i = 0; i < n; ++i) {
    const bool uploaded = trace.clients[i].admitted;
    caches[i] = refresh_cache(std::move(caches[i]), w, grads[i], uploaded);
    caches[i] = advance_clock(std::move(caches[i]), uploaded, received[i], fed.censor.T0);
  }

  state.global_model = std::move(next);
  state.round = t + 1;
  state.cumulative_uploads += trace.uploads_attempted;
  trace.cumulative_uploads = state.cumulative_uploads;

  trace.loss = global_loss(state.global_model, fed.datasets, fed.loss);
  if (fed.f_star) trace.gap = trace.loss - *fed.f_star;
  trace.participation_pct =
      100.0 * static_cast<double>(trace.uploads_attempted) / static_cast<double>(n);
  return trace;
}

Federation build_federation(const SimConfig& config) {
  config.validate();
  Federation fed;
  SyntheticTask task =
      synth_dataset(config.seed, config.clients, config.dimension, config.samples_per_client,
                    config.loss, config.label_noise, config.partition, config.shards_per_client);
  fed.datasets = std::move(task.clients);
  fed.weights = data_weights(fed.datasets);
  fed.loss = LossSpec{config.loss, config.lambda};
  fed.channel = config.channel();
  fed.budget = config.budget();
  fed.algorithm = config.algorithm;
  fed.stale_copy = config.stale_copy;
  fed.outage = config.outage;
  fed.local_epochs = config.local_epochs;
  fed.rng = RngStreams(config.seed);

  fed.distances_m.resize(config.clients);
  for (std::size_t i = 0; i < config.clients; ++i) {
    auto rng = fed.rng.stream(StreamPurpose::Placement, i);
    fed.distances_m[i] = ring_distance(rng, config.inner_radius_m, config.outer_radius_m);
  }

  fed.constants = smoothness_constants(fed.datasets, fed.loss);
  fed.eta = config.eta_mode == EtaMode::InverseL ? 1.0 / fed.constants.L : config.eta;
  try {
    fed.f_star = optimal_value(fed.datasets, fed.loss).f_star;
  } catch (const OracleFailure&) {
    fed.f_star.reset();
  }

  const int T0 = config.staleness_limit;
  if (config.censor_delta) {
    fed.censor.K = config.censor_window;
    fed.censor.delta = *config.censor_delta;
    fed.censor.T0 = T0;
    fed.censor.N = config.clients;
    fed.censor.eta = fed.eta;
  } else {
    fed.censor = CensorConfig::with_intensity(config.censor_window, config.censor_intensity, T0,
                                              config.clients, fed.eta);
  }
  fed.censor.validate();
  fed.channel.validate();
  fed.budget.validate();
  return fed;
}

Simulation::Simulation(const SimConfig& config) : Simulation(build_federation(config)) {}

Simulation::Simulation(Federation federation) : fed_(std::move(federation)) {
  state_ = initial_server_state(fed_);
  caches_ = initial_client_caches(fed_, state_.global_model);
}

RoundTrace Simulation::step() { return run_round(fed_, state_, caches_); }

SimulationResult run_simulation(const SimConfig& config) {
  Simulation sim(config);
  const Federation& fed = sim.federation();
  SimulationResult out;
  out.f_star = fed.f_star;
  out.constants = fed.constants;
  out.eta = fed.eta;
  out.weights = fed.weights;
  out.initial_loss = global_loss(sim.state().global_model, fed.datasets, fed.loss);
  if (fed.f_star) out.initial_gap = out.initial_loss - *fed.f_star;

  for (std::size_t r = 0; r < config.rounds; ++r) {
    RoundTrace trace = sim.step();
    const bool done = config.target_gap && trace.gap && *trace.gap <= *config.target_gap;
    out.traces.push_back(std::move(trace));
    if (done) break;
  }
  return out;
}

SimulationResult run_fedavg_baseline(SimConfig config) {
  config.algorithm = Algorithm::FedAvgUniform;
  return run_simulation(config);
}

}  // namespace cefl
