#pragma once

#include <cmath>
#include <cstdint>

namespace isogap {

// Splittable counter-based generator (splitmix64 steps).  Every random
// quantity in the project derives from one of these, seeded directly or
// split off a parent with a salt, so runs are reproducible from a single
// configured seed.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Child stream decorrelated from the parent by the salt; advancing the
  // child does not advance the parent.
  Rng split(std::uint64_t salt) const {
    Rng mix(state_ ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    mix.next_u64();
    return Rng(mix.next_u64());
  }

  // Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; one fresh pair per call keeps the
  // stream position independent of call history.
  double normal() {
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

private:
  std::uint64_t state_;
};

}  // namespace isogap
