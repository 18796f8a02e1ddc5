#include "cefl/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <span>

#include "cefl/error.hpp"
#include "cefl/rng.hpp"

namespace cefl {
namespace {

ClientDataset gather(const ClientDataset& pool, std::span<const std::size_t> rows) {
  ClientDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), pool.dimension());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(rows[r]);
    out.features.row(static_cast<Eigen::Index>(r)) = pool.features.row(src);
    out.labels(static_cast<Eigen::Index>(r)) = pool.labels(src);
  }
  return out;
}

}  // namespace

ClientDataset synth_pool(std::mt19937_64& rng, std::size_t samples, const ModelVector& planted,
                         LossKind kind, double noise) {
  const auto d = planted.size();
  std::normal_distribution<double> normal(0.0, 1.0);
  ClientDataset out;
  out.features.resize(static_cast<Eigen::Index>(samples), d);
  out.labels.resize(static_cast<Eigen::Index>(samples));
  for (Eigen::Index r = 0; r < out.features.rows(); ++r) {
    for (Eigen::Index c = 0; c < d; ++c) out.features(r, c) = normal(rng);
    const double z = out.features.row(r).dot(planted) + noise * normal(rng);
    out.labels(r) = kind == LossKind::Ridge ? z : (z >= 0.0 ? 1.0 : -1.0);
  }
  return out;
}

SyntheticTask synth_dataset(std::uint64_t seed, std::size_t clients, std::size_t dimension,
                            std::size_t samples_per_client, LossKind kind, double noise,
                            PartitionMode mode, std::size_t shards_per_client) {
  if (clients == 0 || dimension == 0 || samples_per_client == 0) {
    throw InvalidInput("synth_dataset needs positive sizes");
  }
  const RngStreams streams(seed);
  SyntheticTask task;
  auto planted_rng = streams.stream(StreamPurpose::Planted);
  std::normal_distribution<double> normal(0.0, 1.0);
  task.planted.resize(static_cast<Eigen::Index>(dimension));
  for (auto& v : task.planted) v = normal(planted_rng);

  auto data_rng = streams.stream(StreamPurpose::Data);
  const ClientDataset all =
      synth_pool(data_rng, clients * samples_per_client, task.planted, kind, noise);
  auto part_rng = streams.stream(StreamPurpose::Partition);
  task.clients = mode == PartitionMode::Iid
                     ? partition_iid(all, clients, part_rng)
                     : partition_noniid(all, clients, shards_per_client, part_rng);
  return task;
}

std::vector<ClientDataset> partition_iid(const ClientDataset& pool, std::size_t clients,
                                         std::mt19937_64& rng) {
  if (clients == 0) throw InvalidInput("partition needs at least one client");
  const std::size_t per = pool.size() / clients;
  if (per == 0) throw InvalidInput("pool smaller than client count");
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<ClientDataset> out;
  out.reserve(clients);
  for (std::size_t i = 0; i < clients; ++i) {
    out.push_back(gather(pool, std::span(order).subspan(i * per, per)));
  }
  return out;
}

std::vector<ClientDataset> partition_noniid(const ClientDataset& pool, std::size_t clients,
                                            std::size_t shards_per_client, std::mt19937_64& rng) {
  if (clients == 0 || shards_per_client == 0) {
    throw InvalidInput("partition needs positive client and shard counts");
  }
  const std::size_t shards = clients * shards_per_client;
  const std::size_t shard_size = pool.size() / shards;
  if (shard_size == 0) throw InvalidInput("pool smaller than the shard count");

  std::vector<std::size_t> sorted(pool.size());
  std::iota(sorted.begin(), sorted.end(), std::size_t{0});
  std::stable_sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
    return pool.labels(static_cast<Eigen::Index>(a)) < pool.labels(static_cast<Eigen::Index>(b));
  });
  sorted.resize(shards * shard_size);

  std::vector<std::size_t> shard_ids(shards);
  std::iota(shard_ids.begin(), shard_ids.end(), std::size_t{0});
  std::shuffle(shard_ids.begin(), shard_ids.end(), rng);

  std::vector<ClientDataset> out;
  out.reserve(clients);
  for (std::size_t i = 0; i < clients; ++i) {
    std::vector<std::size_t> rows;
    rows.reserve(shards_per_client * shard_size);
    for (std::size_t s = 0; s < shards_per_client; ++s) {
      const std::size_t shard = shard_ids[i * shards_per_client + s];
      const auto first = sorted.begin() + static_cast<std::ptrdiff_t>(shard * shard_size);
      rows.insert(rows.end(), first, first + static_cast<std::ptrdiff_t>(shard_size));
    }
    out.push_back(gather(pool, rows));
  }
  return out;
}

}  // namespace cefl
