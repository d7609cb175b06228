#include "ibandit/rng.hpp"

#include <stdexcept>

namespace ibandit {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
  return splitmix64(seed ^ splitmix64(value + 0x632be59bd9b4e019ULL));
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

StreamKey StreamKey::derive(std::string_view purpose) const {
  StreamKey out;
  out.key_ = hash_combine(key_, hash_label(purpose));
  return out;
}

StreamKey StreamKey::derive(std::uint64_t index) const {
  StreamKey out;
  out.key_ = hash_combine(key_, splitmix64(index ^ 0xa0761d6478bd642fULL));
  return out;
}

std::uint64_t StreamKey::bits(std::uint64_t counter,
                              std::uint64_t subkey) const {
  return hash_combine(hash_combine(key_, counter), subkey);
}

double StreamKey::uniform(std::uint64_t counter, std::uint64_t subkey) const {
  return static_cast<double>(bits(counter, subkey) >> 11) * 0x1.0p-53;
}

std::size_t sample_index(std::span<const double> weights, double u) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw std::invalid_argument("sample_index: no positive weight");
  const double target = u * total;
  double running = 0.0;
  std::size_t last_positive = weights.size();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    running += weights[i];
    last_positive = i;
    if (target < running) return i;
  }
  return last_positive;
}

}  // namespace ibandit
