#pragma once
// Counter-based deterministic random streams. Every (master seed, trial,
// substream) triple maps to an independent generator state, so Monte Carlo
// counts are identical no matter how trials are scheduled across threads.

#include <cmath>
#include <cstdint>

namespace covertsim {

// SplitMix64 finalizer; full-avalanche 64-bit mixing.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Substream labels used by the simulator. Keep values stable: they are part
// of what makes a run reproducible from its master seed.
enum class Substream : std::uint64_t {
  chips = 1,
  messages = 2,
  bob_noise = 3,
  willie_noise = 4,
  willie_silent = 5,
  scenario = 6,
};

// Stream seed for a (trial, substream) pair under a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, Substream sub) {
  std::uint64_t s = mix64(master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(sub) + 1));
  return mix64(s ^ (0xd1b54a32d192ed03ULL * (trial + 1)));
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  static RngStream derive(std::uint64_t master, std::uint64_t trial, Substream sub) {
    return RngStream(derive_seed(master, trial, sub));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform on (0,1]; never returns 0 so log() below is safe.
  double next_unit() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace covertsim
