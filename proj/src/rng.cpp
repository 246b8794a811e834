#include "ewlab/rng.hpp"

#include <stdexcept>

#include "ewlab/stats_basic.hpp"

namespace ewlab {

std::uint64_t stream_key(const SeedSpec& seed) {
  if (seed.stream.experiment >= (1u << 16)) throw std::invalid_argument("stream_key: experiment id overflows 16 bits");
  if (seed.stream.replica >= (1ULL << 40)) throw std::invalid_argument("stream_key: replica id overflows 40 bits");
  if (seed.stream.window >= (1u << 8)) throw std::invalid_argument("stream_key: window id overflows 8 bits");
  std::uint64_t packed = (static_cast<std::uint64_t>(seed.stream.experiment) << 48) |
                         (seed.stream.replica << 8) | seed.stream.window;
  return mix64(mix64(seed.master) + packed);
}

PhiloxBlock philox4x32(std::uint64_t key, std::uint64_t cell, std::uint64_t time_bits) {
  constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
  constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  PhiloxBlock c{{static_cast<std::uint32_t>(cell), static_cast<std::uint32_t>(cell >> 32),
                 static_cast<std::uint32_t>(time_bits), static_cast<std::uint32_t>(time_bits >> 32)}};
  for (int round = 0; round < 10; ++round) {
    std::uint64_t p0 = static_cast<std::uint64_t>(M0) * c.v[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(M1) * c.v[2];
    PhiloxBlock n;
    n.v[0] = static_cast<std::uint32_t>(p1 >> 32) ^ c.v[1] ^ k0;
    n.v[1] = static_cast<std::uint32_t>(p1);
    n.v[2] = static_cast<std::uint32_t>(p0 >> 32) ^ c.v[3] ^ k1;
    n.v[3] = static_cast<std::uint32_t>(p0);
    c = n;
    k0 += W0;
    k1 += W1;
  }
  return c;
}

double uniform_sample(std::uint64_t key, std::int64_t time_index, std::uint64_t cell_index) {
  PhiloxBlock b = philox4x32(key, cell_index, static_cast<std::uint64_t>(time_index));
  std::uint64_t u = (static_cast<std::uint64_t>(b.v[0]) << 32) | b.v[1];
  return (static_cast<double>(u >> 11) + 0.5) * 0x1.0p-53;
}

double normal_sample(std::uint64_t key, std::int64_t time_index, std::uint64_t cell_index) {
  return standard_normal_inv_cdf(uniform_sample(key, time_index, cell_index));
}

}  // namespace ewlab
