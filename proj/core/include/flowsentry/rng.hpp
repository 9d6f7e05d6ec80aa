#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace flowsentry {

/// Deterministic random stream. The engine is std::mt19937_64 (whose output
/// sequence is fixed by the standard); the uniform/normal transforms are
/// implemented here so that draws are reproducible bit-for-bit regardless of
/// the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal draw via Box-Muller; the paired value is cached.
  double normal();

  /// Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  std::uint64_t bounded(std::uint64_t n);

  /// In-place Fisher-Yates shuffle (std::shuffle is implementation-defined).
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[bounded(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives an independent stream seed from a master seed, a stream tag, and
/// up to three indices (epoch, graph, view, ...). Pure mixing function.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t a = 0,
                          std::uint64_t b = 0, std::uint64_t c = 0);

}  // namespace flowsentry
