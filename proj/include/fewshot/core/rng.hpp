#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace fewshot {

/// Deterministic random source. All distribution mapping is done here rather
/// than through std:: distributions, whose output is implementation-defined;
/// identical seeds give identical streams on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, n), n > 0. Rejection sampling, bias-free.
  int uniform_int(int n);

  /// Uniform double in [lo, hi).
  double uniform(double lo = 0.0, double hi = 1.0);

  /// Standard normal via the Marsaglia polar method.
  double gaussian();

  /// k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

  /// k indices drawn uniformly from [0, n) with replacement.
  std::vector<int> sample_with_replacement(int n, int k);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (int i = static_cast<int>(items.size()) - 1; i > 0; --i) {
      std::swap(items[i], items[uniform_int(i + 1)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer; decorrelates nearby seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag);

/// FNV-1a hash, used to tag streams by name (class names, parameter names).
std::uint64_t fnv1a(std::string_view s);

}  // namespace fewshot
