#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gewdiff/types.hpp"

namespace gewdiff {

// ============================================================================
// Rng - deterministic seeded generator.
//
// Algorithm (fixed, documented): xoshiro256** for the integer stream, state
// expanded from the 64-bit seed via splitmix64. Standard normals come from
// the Box-Muller transform (pairs, second value cached). The integer stream
// is bit-portable; normals additionally depend on libm log/cos/sin rounding,
// so they are bit-stable per platform and reproducible everywhere up to
// last-ulp libm differences.
//
// Instances are single-owner. Parallel code derives substreams with
// derive(), never shares one stream.
// ============================================================================
class Rng {
public:
    explicit Rng(uint64_t seed);

    uint64_t next_u64();

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01();

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal draw (Box-Muller).
    double normal();

    // n i.i.d. standard normal draws; n = 0 yields an empty vector.
    std::vector<double> normal_vector(size_t n);

    // Independent stream for the same master seed; distinct `stream` values
    // give decorrelated sequences.
    Rng derive(uint64_t stream) const;

    uint64_t seed() const { return seed_; }

private:
    uint64_t seed_ = 0;
    std::array<uint64_t, 4> state_{};
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// I.i.d. standard-normal latent field, deterministic under the rng state.
LatentCube standard_normal_field(Rng& rng, int height, int width, int channels);

} // namespace gewdiff
