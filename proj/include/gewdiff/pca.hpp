#pragma once

#include <vector>

#include "gewdiff/types.hpp"

namespace gewdiff {

// Spectral PCA over pixels: samples are pixel vectors, features are channels.
// The retained basis doubles as the decoder-side record - projecting any cube
// of matching channel count through it is well defined, discarded directions
// reconstruct as zero.
struct PcaModel {
    std::vector<double> mean;                   // length C
    std::vector<std::vector<double>> loadings;  // k rows, orthonormal, length C
    std::vector<double> eigenvalues;            // length k, non-increasing
    int retained = 0;

    int channels() const { return static_cast<int>(mean.size()); }
    void validate() const;
};

// Fit by SVD of the centered pixel-by-channel matrix (covariance is never
// formed). Deterministic sign convention: each loading row is flipped so its
// largest-magnitude entry is positive.
PcaModel pca_fit(const LatentCube& cube, int k);

// Per pixel: z = loadings * (x - mean).
LatentCube pca_project(const LatentCube& cube, const PcaModel& model);

// Per pixel: x = loadings^T * z + mean.
LatentCube pca_inverse(const LatentCube& latent, const PcaModel& model);

} // namespace gewdiff
