#pragma once

// Counter-based splittable random generator.
//
// Every random quantity in the library is a pure function of
// (key, stream, counter), so identical seeds reproduce identical instances
// bit-for-bit on any platform. Nothing here depends on std::shuffle or
// std::*_distribution, whose outputs are implementation-defined.

#include <cstdint>
#include <vector>

#include "mbcsp/rational.hpp"

namespace mbcsp {

// 64-bit finalizer with full avalanche (splitmix64 increment + murmur-style
// mixing); bijective on uint64_t.
inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stateless keyed PRF over a (key, stream, counter) triple.
inline uint64_t prf(uint64_t key, uint64_t stream, uint64_t ctr) {
  uint64_t h = mix64(key ^ 0x243f6a8885a308d3ULL);  // domain-separate from raw mix64
  h = mix64(h ^ stream);
  return mix64(h ^ ctr);
}

// Uniform double in [0,1) with 53 random bits.
inline double u64_to_unit(uint64_t v) {
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

class SplitRng {
 public:
  explicit SplitRng(uint64_t key, uint64_t stream = 0)
      : key_(key), stream_(stream) {}

  uint64_t next_u64() { return prf(key_, stream_, ctr_++); }

  // Child generator with an independent stream; deterministic in (parent, id).
  SplitRng split(uint64_t child_id) const {
    return SplitRng(prf(key_, stream_, 0x9d2c5680ULL), child_id);
  }

  // Uniform in {0, ..., bound-1} by rejection (no modulo bias).
  uint64_t next_below(uint64_t bound) {
    if (bound == 0) throw ArgumentError("next_below: bound must be positive");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  double next_unit() { return u64_to_unit(next_u64()); }

  bool next_bernoulli(double p) { return next_unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {  // Fisher-Yates, fixed draw order
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  uint64_t key() const { return key_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t key_;
  uint64_t stream_;
  uint64_t ctr_ = 0;
};

}  // namespace mbcsp
