#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace otnet {

/// FNV-1a, used to turn stream labels into integers.
constexpr std::uint64_t tag(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Identifies an independent random stream. Child keys are derived by
/// hashing, so a stream for (seed, "step", t) never depends on how many
/// other streams were consumed before it.
class StreamKey {
 public:
  constexpr StreamKey() = default;
  constexpr explicit StreamKey(std::uint64_t value) : value_(value) {}

  static constexpr StreamKey from_seed(std::uint64_t seed) { return StreamKey(mix64(seed ^ 0x6a09e667f3bcc909ULL)); }

  constexpr StreamKey child(std::uint64_t id) const { return StreamKey(mix64(value_ ^ mix64(id + 0x3c6ef372fe94f82bULL))); }
  constexpr StreamKey child(std::string_view label) const { return child(tag(label)); }
  constexpr StreamKey child(std::initializer_list<std::uint64_t> ids) const {
    StreamKey k = *this;
    for (auto id : ids) k = k.child(id);
    return k;
  }

  constexpr std::uint64_t value() const { return value_; }
  constexpr bool operator==(const StreamKey&) const = default;

 private:
  std::uint64_t value_ = 0;
};

/// Counter-based generator: draw i of a stream is mix64(key + mix64(i)).
/// Normals use Box-Muller on consecutive uniform pairs.
class Stream {
 public:
  explicit Stream(StreamKey key) : key_(key.value()) {}

  std::uint64_t next_u64() { return mix64(key_ + mix64(counter_++)); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace otnet
