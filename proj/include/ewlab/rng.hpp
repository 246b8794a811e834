#ifndef EWLAB_RNG_HPP
#define EWLAB_RNG_HPP

#include <cstdint>

namespace ewlab {

// Stream identity: (experiment, replica, window) packs injectively into a
// 64-bit substream id (16 + 40 + 8 bits), so distinct streams never share
// a Philox key under one master seed.
struct StreamId {
  std::uint32_t experiment = 0;
  std::uint64_t replica = 0;
  std::uint32_t window = 0;
};

struct SeedSpec {
  std::uint64_t master = 0;
  StreamId stream;
};

// SplitMix64 finalizer; a bijection on 64-bit words
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_key(const SeedSpec& seed);

// Philox4x32-10 block at counter (cell, time), keyed by a stream key.
struct PhiloxBlock {
  std::uint32_t v[4];
};
PhiloxBlock philox4x32(std::uint64_t key, std::uint64_t cell, std::uint64_t time_bits);

// uniform in the open interval (0,1) with 53 random bits
double uniform_sample(std::uint64_t key, std::int64_t time_index, std::uint64_t cell_index);
// standard normal via the inverse CDF of the uniform above
double normal_sample(std::uint64_t key, std::int64_t time_index, std::uint64_t cell_index);

}  // namespace ewlab

#endif
