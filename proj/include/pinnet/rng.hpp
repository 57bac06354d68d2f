#pragma once

#include <cmath>
#include <cstdint>

namespace pinnet {

// Seedable splittable generator built on the splitmix64 mixer.  A stream is
// identified by (seed, stream_id); distinct stream ids give statistically
// independent sequences, which is what ensemble runs and per-agent draws use.
// All sampling goes through this type so runs are reproducible across
// platforms with the same binary.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : state_(mix(seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1)) ^
               mix(stream_id + 0xbf58476d1ce4e5b9ULL)) {
    if (state_ == 0) state_ = 0x2545f4914f6cdd1dULL;
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 significant bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Inverse-CDF exponential draw; exact given u01.
  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

  // Index in [0, n) from cumulative weights; weights need not be normalized.
  // Zero-weight indices are never returned, including via the rounding
  // fallback at the top of the range.
  std::size_t categorical(const double* w, std::size_t n) {
    double total = 0;
    std::size_t last_positive = n;
    for (std::size_t i = 0; i < n; ++i) {
      total += w[i];
      if (w[i] > 0) last_positive = i;
    }
    double u = u01() * total;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      acc += w[i];
      if (u < acc && w[i] > 0) return i;
    }
    return last_positive < n ? last_positive : n - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace pinnet
