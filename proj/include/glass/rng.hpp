#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace glass {

// xoshiro256** seeded through splitmix64. Every derived quantity (integer
// ranges, doubles, normals, shuffles) is computed here from raw 64-bit draws,
// so a seed produces the same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64();

  // Uniform on [0, bound). bound must be > 0. Lemire's multiply-shift with
  // rejection, so the result is exactly uniform.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform on the inclusive range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform on [0, 1) with 53 random mantissa bits.
  double uniform01();

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  // Bernoulli(p).
  bool bernoulli(double p) { return uniform01() < p; }

  // Fisher-Yates; only the first `count` positions are randomised (partial
  // shuffle). count defaults to the full span.
  template <class T>
  void shuffle(std::span<T> items, std::size_t count);
  template <class T>
  void shuffle(std::span<T> items) { shuffle(items, items.size()); }

  // Stream derivation for reproducible parallel work: (seed, index) maps to a
  // well-mixed independent seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return derive(derive(seed, a), b);
  }

 private:
  std::array<std::uint64_t, 4> state_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

template <class T>
void Rng::shuffle(std::span<T> items, std::size_t count) {
  const std::size_t n = items.size();
  if (count > n) count = n;
  for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_below(n - i));
    using std::swap;
    swap(items[i], items[j]);
  }
}

}  // namespace glass
