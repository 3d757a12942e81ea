#pragma once

#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mpctune {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Independent stream seed for (base, stream).
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t s = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  return splitmix64(s);
}

// mt19937_64 is fully specified by the standard; the distributions below are
// our own because std:: distributions are implementation-defined and would
// break cross-platform reproducibility of traces.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  // uniform in [0, 1)
  double uniform() { return std::ldexp(static_cast<double>(eng_() >> 11), -53); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // uniform integer in [0, n), n >= 1
  uint64_t integer(uint64_t n) {
    const uint64_t t = (0 - n) % n;  // 2^64 mod n
    uint64_t v;
    do {
      v = eng_();
    } while (v < t);
    return (v - t) % n;
  }

  // standard normal via Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  template <class Vec>
  void shuffle(Vec& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(integer(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace mpctune
