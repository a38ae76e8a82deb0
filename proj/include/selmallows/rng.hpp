#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

namespace selmallows {

// Seedable, splittable 64-bit generator (SplitMix64 stream).
//
// A child stream is a pure function of the parent's construction key and the
// child id, never of how many values the parent has produced, so substreams
// can be derived in any order (e.g. from worker threads) with identical
// results. All bounded draws are integer-only, which keeps every sampling
// decision bit-identical across platforms and standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : key_(seed), state_(mix(seed ^ kStreamSalt)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += kGolden;
    return mix(state_);
  }

  [[nodiscard]] Rng split(std::uint64_t id) const {
    return Rng(mix(key_ + kGolden * (mix(id) | 1U)));
  }

  [[nodiscard]] Rng split(std::initializer_list<std::uint64_t> path) const {
    Rng out = *this;
    for (auto id : path) out = out.split(id);
    return out;
  }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // 53-bit uniform double in [0, 1).
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // True with probability num / den, decided on integers.
  bool bernoulli_fixed(std::uint64_t threshold) { return (*this)() < threshold; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

  [[nodiscard]] std::uint64_t key() const { return key_; }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamSalt = 0x6a09e667f3bcc909ULL;

  std::uint64_t key_;
  std::uint64_t state_;
};

// Converts a probability to a 64-bit threshold for Rng::bernoulli_fixed.
inline std::uint64_t probability_threshold(double prob) {
  if (!(prob > 0.0)) return 0;
  // Scaling a double by 2^64 is exact, so the threshold is platform independent.
  const double scaled = std::ldexp(prob, 64);
  if (scaled >= 0x1.0p64) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(scaled);
}

}  // namespace selmallows
