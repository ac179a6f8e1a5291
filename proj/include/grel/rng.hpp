#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

// Deterministic random number generation. All randomness in the project goes
// through this wrapper so that a (generator, seed) pair fully identifies a
// dataset or experiment run. Generator identity: std::mt19937_64 with the
// derivations below; the standard pins its output sequence, so results are
// reproducible across platforms and compilers.

namespace grel {

// SplitMix64 step, used to derive per-repetition seeds from a master seed.
std::uint64_t splitmix64(std::uint64_t x);

// seed_i = hash(master, i); distinct repetitions get decorrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [0, n) without modulo bias (masked rejection).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    std::uint64_t mask = ~std::uint64_t{0};
    std::uint64_t m = n - 1;
    mask >>= (m == 0) ? 63 : __builtin_clzll(m);
    for (;;) {
      std::uint64_t v = gen_() & mask;
      if (v < n) return v;
    }
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values from {0, ..., n-1}, in random order (partial shuffle).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) {
      throw std::invalid_argument("sample_without_replacement: k exceeds population");
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace grel
