#include "cefl/rng.hpp"

namespace cefl {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 RngStreams::stream(StreamPurpose purpose, std::uint64_t client,
                                   std::uint64_t round) const {
  std::uint64_t h = mix64(master_);
  h = mix64(h ^ static_cast<std::uint64_t>(purpose));
  h = mix64(h ^ client);
  h = mix64(h ^ round);
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace cefl
