#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace pm {

/// Platform-independent seeded generator for every sampling decision.
///
/// std::mt19937_64 is bit-exact across standard libraries; the standard
/// distributions are not, so bounded draws and shuffles are implemented
/// here on top of the raw 64-bit stream.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // reject the partial block at the top of the range
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  /// Fisher-Yates, drawing from the back.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pm
