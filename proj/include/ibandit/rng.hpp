#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace ibandit {

// Counter-based randomness. Every random draw is a pure function of a stream
// key and a counter tuple, so adding or removing draws in one stream never
// shifts another.

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combination of two 64-bit words.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

// FNV-1a of a label followed by a splitmix finalizer.
std::uint64_t hash_label(std::string_view label);

// Identifies one independent stream, e.g. (run seed, "chance") or
// (run seed, player, "agent").
class StreamKey {
 public:
  StreamKey() = default;
  explicit StreamKey(std::uint64_t seed) : key_(splitmix64(seed)) {}

  StreamKey derive(std::string_view purpose) const;
  StreamKey derive(std::uint64_t index) const;

  std::uint64_t bits(std::uint64_t counter, std::uint64_t subkey) const;
  // Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t counter, std::uint64_t subkey) const;

  std::uint64_t value() const { return key_; }

 private:
  std::uint64_t key_ = 0x6a09e667f3bcc908ULL;
};

// Index of the first cumulative weight exceeding u * total. Zero-weight
// entries are never returned.
std::size_t sample_index(std::span<const double> weights, double u);

// Sequential generator over a stream, for plumbing that needs many draws
// (test fixtures, random strategies).
class CounterRng {
 public:
  explicit CounterRng(StreamKey key) : key_(key) {}
  std::uint64_t next_bits() { return key_.bits(counter_++, 0); }
  double next_uniform() { return key_.uniform(counter_++, 0); }
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_uniform() * static_cast<double>(n));
  }

 private:
  StreamKey key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ibandit
