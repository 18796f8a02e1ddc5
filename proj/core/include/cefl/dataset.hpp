#pragma once

// Synthetic learning tasks and client partitioning.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "cefl/config.hpp"
#include "cefl/fedmath.hpp"

namespace cefl {

struct SyntheticTask {
  std::vector<ClientDataset> clients;
  ModelVector planted;
};

/// `samples` rows of standard Gaussian features. Ridge labels are
/// x.w + noise * n; logistic labels are sign(x.w + noise * n) in {-1, +1}.
ClientDataset synth_pool(std::mt19937_64& rng, std::size_t samples, const ModelVector& planted,
                         LossKind kind, double noise);

/// N equal-size client datasets drawn around a planted model. Deterministic
/// in `seed`.
SyntheticTask synth_dataset(std::uint64_t seed, std::size_t clients, std::size_t dimension,
                            std::size_t samples_per_client, LossKind kind, double noise,
                            PartitionMode mode = PartitionMode::Iid,
                            std::size_t shards_per_client = 2);

/// Shuffled split into N equal pieces; the remainder of size mod N is dropped.
std::vector<ClientDataset> partition_iid(const ClientDataset& pool, std::size_t clients,
                                         std::mt19937_64& rng);

/// Label-sorted pool (stable) cut into N * shards_per_client contiguous
/// shards after truncating to a multiple of that count; every client gets
/// shards_per_client shards drawn without replacement.
std::vector<ClientDataset> partition_noniid(const ClientDataset& pool, std::size_t clients,
                                            std::size_t shards_per_client, std::mt19937_64& rng);

}  // namespace cefl
