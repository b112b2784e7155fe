#pragma once

#include <cstdint>

#include "gewdiff/types.hpp"

namespace gewdiff {

// Seeded synthetic scene so every test and demo runs without external data:
// a piecewise-constant Voronoi segment map, one smooth spectrum per segment
// (sum of three Gaussian bumps over the band axis) scaled by a per-pixel
// brightness factor, plus a low-amplitude per-pixel spectral texture whose
// bump centers vary pixel to pixel. The texture keeps the spectral rank well
// above typical latent sizes, so codec error decays smoothly with retained
// components instead of collapsing to float noise.
struct SyntheticScene {
    HsiCube cube;
    SegmentationMap segments;
};

struct SyntheticConfig {
    int height = 64;
    int width = 64;
    int bands = 242;
    int num_segments = 8;
    uint64_t seed = 7;
    double texture_amplitude = 0.01;
    double brightness_spread = 0.1;
};

SyntheticScene gen_synthetic(const SyntheticConfig& cfg);

} // namespace gewdiff
