#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace attnalloc {

/// Named substreams. Every random draw in the library is keyed by one of these.
enum class Stream : std::uint64_t {
  World = 1,
  Sparsify = 2,
  Scene = 3,
  Fit = 4,
  Holdout = 5,
  GazeNoise = 6,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent seed from a master seed, a stream tag and an index.
std::uint64_t substream(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept;

/// Uniform in [0, 1) from a single 64-bit word (53-bit mantissa).
inline double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Thin wrapper over mt19937_64. The standard distributions are not
// bit-reproducible across standard libraries, so the mappings are done here.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform01() { return to_unit(engine_()); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [lo, hi], both inclusive. Unbiased (rejection).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller.
  double normal();

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// k distinct indices from [0, n), in selection order.
  std::vector<int> sample_without_replacement(int n, int k);

  /// k distinct indices from [0, weights.size()), drawn sequentially proportional to weight.
  std::vector<int> weighted_sample_without_replacement(std::span<const double> weights, int k);

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace attnalloc
