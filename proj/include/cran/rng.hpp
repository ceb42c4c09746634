#pragma once

#include <cstdint>
#include <random>

namespace cran {

// Thin wrapper around mt19937_64 with hand-rolled inverse-CDF draws.
// std::uniform_real_distribution and friends are implementation-defined in
// their consumption of engine output, which would break bit-reproducible
// experiment CSVs across toolchains.  Everything here is fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform in [0,1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unit-mean exponential draw (Rayleigh power fading).
  double exponential() {
    double u = uniform();
    // u == 1 cannot happen (strictly below 1); u == 0 maps to 0 via -log1p.
    return -std::log1p(-u);
  }

  // Integer in [0, n).  Rejection-free modulo is fine here: n is tiny
  // (user counts, RRH counts) compared to 2^64, bias is ~n/2^64.
  std::uint64_t below(std::uint64_t n) { return eng_() % n; }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Derives a stream seed for sub-tasks (per-realization channels etc.) so
// parallel or out-of-order evaluation cannot change results.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace cran
