#pragma once

#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace blossom {

using Rng = std::mt19937_64;
using VertexId = std::int32_t;

enum class Color : std::uint8_t { black, white };

inline Color opposite(Color c) { return c == Color::black ? Color::white : Color::black; }
inline char color_char(Color c) { return c == Color::black ? 'b' : 'w'; }

// Malformed input: wrong stem colors, broken twins, bad ids.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Well-formed input outside an operation's domain.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A guard or budget was exhausted.
struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two independent computations disagree. Always a bug.
struct InternalConsistencyError : std::logic_error {
  using std::logic_error::logic_error;
};

struct CanonicalCode {
  std::string code;
  auto operator<=>(const CanonicalCode&) const = default;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// Per-sample stream; serial and parallel loops draw identical samples.
inline Rng sample_rng(std::uint64_t seed, std::uint64_t index) { return Rng(mix_seed(seed, index)); }

// Cheap generator for short keyed draws, e.g. one offspring word.
struct KeyStream {
  using result_type = std::uint64_t;
  std::uint64_t state;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return splitmix64(state += 0x9e3779b97f4a7c15ULL); }
};

template <class G>
std::uint64_t uniform_below(G& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

}  // namespace blossom
