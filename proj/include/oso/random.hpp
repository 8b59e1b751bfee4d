#pragma once

#include <cmath>
#include <complex>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>

namespace oso {

/// SplitMix64 stream. Small state, so one can be spun up per link without cost,
/// and keyed construction lets any (seed, trial, link) tuple own an
/// independent reproducible stream.
class Stream {
 public:
  using result_type = std::uint64_t;

  constexpr explicit Stream(std::uint64_t state) noexcept : state_(state) {}

  /// Stream keyed by a list of integers; distinct key lists give unrelated streams.
  static constexpr Stream keyed(std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc909ULL;
    for (auto k : keys) h = mix(h ^ mix(k + 0x9e3779b97f4a7c15ULL));
    return Stream(h);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

template <typename G>
concept Uniform64 = std::uniform_random_bit_generator<G> && (G::min() == 0) &&
                    (G::max() == std::numeric_limits<std::uint64_t>::max());

/// Uniform double in [0, 1) with 53 random bits.
template <Uniform64 G>
double uniform01(G& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// One CN(0,1) draw: independent N(0,1/2) real and imaginary parts (Box-Muller).
template <Uniform64 G>
std::complex<double> complex_normal(G& gen) {
  const double u1 = 1.0 - uniform01(gen);  // (0, 1]
  const double u2 = uniform01(gen);
  const double r = std::sqrt(-std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace oso
