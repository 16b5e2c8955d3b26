#pragma once

// Counter-based random streams. A stream is identified by a 64-bit key; the
// i-th output is a pure function of (key, i), so any stream can be re-created
// anywhere without shared state. Keys are derived by hashing a master seed
// with trial indices and stream tags.

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

#include "bmpc/linalg.hpp"

namespace bmpc {

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t key, std::uint64_t v) {
  return mix64(key ^ mix64(v + kGoldenGamma));
}

template <typename... Rest>
inline constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t first, Rest... rest) {
  if constexpr (sizeof...(rest) == 0) {
    return hash_combine(key, first);
  } else {
    return derive_key(hash_combine(key, first), rest...);
  }
}

// FNV-1a, used to turn experiment ids into key material.
inline constexpr std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

enum class StreamTag : std::uint64_t {
  kInitState = 1,
  kProcess = 2,
  kMeasurement = 3,
  kPlannerInit = 4,
  kSystem = 5,
  kSynthetic = 6,
};

// Satisfies UniformRandomBitGenerator; output i = mix64(key + i * gamma).
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream() = default;
  explicit CounterStream(std::uint64_t key) : key_(key) {}
  CounterStream(std::uint64_t seed, StreamTag tag)
      : key_(derive_key(seed, static_cast<std::uint64_t>(tag))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++counter_) * kGoldenGamma); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  // Standard normal draw. The distribution is not cached across calls so the
  // stream state is fully described by (key, counter).
  double normal() {
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(*this);
  }

  Vector normal_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace bmpc
