#pragma once

#include <cstdint>
#include <random>

namespace e3lab {

// What a random stream is used for. Each purpose gets its own substream so
// that, e.g., posterior draws never shift the reward sequence.
enum class Purpose : std::uint32_t {
  Reward = 1,
  Trial = 2,
  Posterior = 3,
  Test = 99,
};

struct StreamKey {
  Purpose purpose = Purpose::Reward;
  std::uint32_t player = 0;
  std::uint32_t replication = 0;
};

// Deterministic random stream derived from a master seed and a substream key.
// Identical (seed, key) pairs yield identical draw sequences.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamKey key);

  // Uniform on [0, 1), 53 bits of resolution.
  double uniform();
  bool bernoulli(double p);
  // Beta(a, b) via the ratio of two gamma variates; result clamped into (0, 1).
  double beta(double a, double b);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to mix seed material into substream seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master_seed, StreamKey key);

}  // namespace e3lab
