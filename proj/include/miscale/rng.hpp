#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace miscale {

// SplitMix64 step (Steele, Lea, Flood 2014). Used only to expand a user seed
// and a stream index into well-mixed engine seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// One deterministic random stream, identified by (seed, stream index).
///
/// The engine is std::mt19937_64, whose output sequence is fully specified by
/// the C++ standard, so draws are bit-identical across platforms. Gaussian
/// variates use an explicit Box-Muller transform because the distribution
/// adapters in <random> are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    std::uint64_t s = splitmix64(state);
    engine_.seed(s);
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Standard normal variate (Box-Muller, one spare cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace miscale
