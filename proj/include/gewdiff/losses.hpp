#pragma once

#include <functional>

#include "gewdiff/types.hpp"

namespace gewdiff {

struct LossWeights {
    double lambda1 = 0.8;  // pixel
    double lambda2 = 0.1;  // perceptual
    double lambda3 = 0.1;  // gradient
    double sigma_data = 0.5;

    void validate() const;
};

// Feature extractor contract: deterministic map from a latent to a flat
// feature vector whose length depends only on the input shape.
using FeatureExtractorFn = std::function<std::vector<double>(const LatentCube&)>;

// In-repo toy extractor: three cascaded 2x2 average-pooling scales,
// concatenated. Partial edge windows are averaged over their actual support,
// so a constant offset between inputs passes through unchanged.
FeatureExtractorFn make_pyramid_extractor();

// (mean squared error + mean per-pixel spectral angle in radians) / 2.
// The angle of a pair involving a zero vector is defined as 0.
double pixel_loss(const LatentCube& pred, const LatentCube& target);

// Mean squared difference between extractor features of both inputs.
double perceptual_loss(const LatentCube& pred, const LatentCube& target,
                       const FeatureExtractorFn& extractor);

// Half the sum of mean absolute forward-difference gaps in x and y.
double gradient_loss(const LatentCube& pred, const LatentCube& target);

// Noise-dependent weighting applied to the weighted component sum:
//   lambda(sigma) = (sigma^2 + sigma_data^2) / (sigma * sigma_data)^2
double loss_weight(double sigma, double sigma_data);

double total_loss(const LatentCube& pred, const LatentCube& target,
                  const FeatureExtractorFn& extractor, const LossWeights& weights,
                  double sigma_t);

} // namespace gewdiff
