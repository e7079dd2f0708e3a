#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace rgl {

// Seeded stream used for every random decision in the project.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions are implemented here rather than taken from
// <random>, whose algorithms are implementation-defined:
//   uniform01()  = (next() >> 11) * 2^-53, a double in [0, 1)
//   bounded(n)   = rejection sampling on next(), uniform in [0, n)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// True with probability p; p <= 0 never fires, p >= 1 always does.
  bool bernoulli(double p) { return uniform01() < p; }

  std::uint64_t bounded(std::uint64_t n) {
    if (n <= 1) {
      next();
      return 0;
    }
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % n;
  }

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = bounded(i);
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rgl
