#ifndef LOGSHOT_RNG_HPP
#define LOGSHOT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace logshot {

// SplitMix64 step (Steele, Lea & Flood).  Used to turn a (seed, stream)
// pair into a well-mixed 64-bit state so that per-path generators are
// decorrelated even for adjacent stream indices.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Deterministic random stream addressed by (seed, stream).
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard, and all variate transformations below are implemented here
// rather than through std::*_distribution (whose algorithms are
// implementation-defined).  Result: the same (seed, stream) produces the
// same draws on any conforming platform, which is what makes ensembles
// reproducible independent of thread count or execution order.
//
// Not thread-safe; use one instance per thread of work.
class SplitRng {
 public:
  SplitRng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(0x5851F42D4C957F2DULL * (stream + 1)))),
        has_spare_(false),
        spare_(0.0) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1): never returns 0 or 1, so logs of
  // uniforms are always finite.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached, so draws come in a fixed deterministic order.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

  // Exponential with the given rate (mean 1/rate), by inversion.
  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("SplitRng::exponential: rate must be positive");
    return -std::log(uniform()) / rate;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_;
  double spare_;
};

}  // namespace logshot

#endif  // LOGSHOT_RNG_HPP
