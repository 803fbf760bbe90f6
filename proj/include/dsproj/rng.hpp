#pragma once

#include <cstdint>
#include <random>

namespace dsproj {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: output t of stream s under seed m is a pure
/// function of (m, s, t). Streams are independent of each other and of the
/// order in which they are consumed, which is what lets per-node draws run in
/// parallel without changing results.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(mix64(seed) ^ mix64(~stream))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return mix64(key_ ^ mix64(counter_++)); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// One node's private random source.
class NodeRng {
 public:
  NodeRng(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }
  CounterRng& engine() { return engine_; }

 private:
  CounterRng engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Reserved stream ids; node streams use 0..N-1.
inline constexpr std::uint64_t kInstanceStream = 0xD15EA5E000000001ULL;
inline constexpr std::uint64_t kProbeStream = 0xD15EA5E000000002ULL;

}  // namespace dsproj
