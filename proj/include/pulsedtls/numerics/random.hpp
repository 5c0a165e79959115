#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pulsedtls::numerics {

/// Seeded uniform stream. The engine (mt19937_64) and the integer-to-double
/// mapping are fully specified, so a seed yields the same sequence on every
/// platform and standard library. Single-owner; derive sub-streams instead of
/// sharing one across workers.
class RandomStream {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64+splitmix64-substreams";

  explicit RandomStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in the open interval (0, 1), 53-bit resolution.
  double uniform_open();

  /// Independent stream for (this seed, index), e.g. one per trajectory.
  RandomStream substream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace pulsedtls::numerics
