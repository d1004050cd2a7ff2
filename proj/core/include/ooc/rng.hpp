#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace ooc {

// Deterministic random stream. All randomness in the toolkit flows from one
// seed through named child streams so every component is independently
// reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Derives an independent stream from the *original* seed and a name.
  // Child derivation does not consume state from this stream.
  Rng child(std::string_view name) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over seed bytes + name
    std::uint64_t s = seed_;
    for (int i = 0; i < 8; ++i) {
      h ^= (s >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
    for (char c : name) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    return Rng(h);
  }

  std::uint64_t next() { return eng_(); }

  // Uniform in [lo, hi). 53-bit mantissa construction, engine-portable.
  double uniform(double lo, double hi) {
    double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Uniform integer in [0, n). Rejection-free modulo is fine at these scales.
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(next() % static_cast<std::uint64_t>(n));
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::string state() const;
  void restore(const std::string& s);

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace ooc
