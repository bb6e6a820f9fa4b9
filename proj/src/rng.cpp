#include "e3lab/rng.hpp"

#include <algorithm>
#include <limits>

namespace e3lab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, StreamKey key) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ static_cast<std::uint64_t>(key.purpose));
  h = mix64(h ^ (static_cast<std::uint64_t>(key.player) << 1));
  h = mix64(h ^ (static_cast<std::uint64_t>(key.replication) << 2));
  return h;
}

RngStream::RngStream(std::uint64_t master_seed, StreamKey key)
    : engine_(derive_seed(master_seed, key)) {}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

double RngStream::beta(double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(engine_);
  const double y = gb(engine_);
  double v = x / (x + y);
  // Open interval: a draw of exactly 0 or 1 only happens through underflow.
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  if (!(v > lo)) v = lo;
  if (v > hi) v = hi;
  return v;
}

}  // namespace e3lab
