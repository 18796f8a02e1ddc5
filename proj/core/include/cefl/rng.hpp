#pragma once

#include <cstdint>
#include <random>

namespace cefl {

/// What a random stream is used for. Part of the stream name, so adding a
/// draw for one purpose never shifts the draws of another.
enum class StreamPurpose : std::uint64_t {
  Placement = 1,
  Fading = 2,
  Outage = 3,
  Data = 4,
  Partition = 5,
  Planted = 6,
};

/// Named, seedable random streams derived from one master seed.
///
/// A stream is identified by (purpose, client, round); the same name always
/// yields the same sequence, independent of evaluation order.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t master_seed = 0) : master_(master_seed) {}

  std::uint64_t master_seed() const { return master_; }

  std::mt19937_64 stream(StreamPurpose purpose, std::uint64_t client = 0,
                         std::uint64_t round = 0) const;

 private:
  std::uint64_t master_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace cefl
