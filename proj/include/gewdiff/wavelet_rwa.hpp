#pragma once

#include <optional>
#include <vector>

#include "gewdiff/types.hpp"

namespace gewdiff {

// ============================================================================
// Regression wavelet analysis along the spectral axis: orthonormal Haar
// splits intercalated with per-level least squares that predicts each detail
// channel from the same level's approximation channels. Keeping the
// prediction residuals makes the transform lossless; dropping them leaves a
// compact near-lossless code.
// ============================================================================

// One Haar split. `approx` holds ceil(parent/2) channels; when the parent
// band count is odd the last approx channel is the unpaired trailing band,
// carried through unchanged.
struct WaveletLevel {
    LatentCube approx;
    LatentCube detail;

    bool has_passthrough() const { return approx.channels == detail.channels + 1; }
    int paired_channels() const { return detail.channels; }
};

// Per-level regression weights. betas[j] has one row per detail channel at
// level j+1; row layout is (intercept, weight per approx channel).
// band_counts[j] is the channel count entering level j+1, so band_counts[0]
// is the original band count.
struct RwaModel {
    int levels = 0;
    std::vector<std::vector<std::vector<double>>> betas;
    std::vector<int> band_counts;

    void validate() const;
};

struct RwaEncoding {
    LatentCube approx_top;
    RwaModel model;
    // Detail residuals per level (level 1 first); present only when the
    // encoding was made in lossless mode.
    std::optional<std::vector<LatentCube>> residuals;
};

// Pairwise orthonormal split: approx = (x0 + x1)/sqrt2, detail = (x0 - x1)/sqrt2.
WaveletLevel haar_forward(const LatentCube& spectrum);
WaveletLevel haar_forward(const HsiCube& cube);

LatentCube haar_inverse(const WaveletLevel& level);

// Ordinary least squares of every detail channel on [1, approx channels],
// solved via SVD pseudoinverse (relative singular-value cutoff 1e-10).
// Returns one coefficient row per detail channel.
std::vector<std::vector<double>> fit_regression(const WaveletLevel& level);

// Predicted detail channels from the approximation side and a beta matrix.
LatentCube predict_details(const LatentCube& approx,
                           const std::vector<std::vector<double>>& betas);

// Applies up to `levels` Haar splits, fitting the detail regression at each.
// Stops early when fewer than two channels remain; the achieved level count
// is recorded in the model.
RwaEncoding rwa_encode(const HsiCube& cube, int levels, bool keep_residuals);

// Reconstructs the original band count from the top approximation, predicting
// details level by level. Residuals are added back when present unless
// zero_residuals is set.
HsiCube rwa_decode(const RwaEncoding& encoding, bool zero_residuals);

} // namespace gewdiff
