#pragma once

#include <cstdint>

namespace grip {

/// Counter-based deterministic random stream. Draw i of the stream with key k
/// is mix64(k + (i+1)*golden), so any draw can be produced independently of
/// the others and the output is a pure function of (seed, tags, counter).
class CounterStream {
public:
  static constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ull;

  // splitmix64 finalizer
  static constexpr uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

  static constexpr uint64_t derive_key(uint64_t seed, uint64_t t0 = 0,
                                       uint64_t t1 = 0, uint64_t t2 = 0) {
    uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (t0 + kGolden));
    k = mix64(k ^ (t1 + kGolden));
    k = mix64(k ^ (t2 + kGolden));
    return k;
  }

  explicit CounterStream(uint64_t seed, uint64_t t0 = 0, uint64_t t1 = 0,
                         uint64_t t2 = 0)
      : key_(derive_key(seed, t0, t1, t2)) {}

  uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1); safe to feed into inverse-CDF transforms.
  double next_open() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

} // namespace grip
