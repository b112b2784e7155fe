#pragma once

#include <string>

#include "gewdiff/types.hpp"

namespace gewdiff {

// Full-reference evaluation record. psnr is +inf for identical inputs
// (serialized as "inf"). fid is intentionally absent: it needs a pretrained
// embedding network, which this library does not ship.
struct MetricReport {
    double psnr = 0.0;
    double ssim = 0.0;
    double sam_deg = 0.0;
    double cc = 0.0;
    double rmse = 0.0;
    double ergas = 0.0;
    double lv = 0.0;
    int skipped_bands = 0;  // bands excluded from cc or ergas (union)

    static std::string csv_header();
    std::string csv_row() const;
};

struct MetricOptions {
    double data_range = 1.0;
    double ergas_scale_ratio = 4.0;
};

// Mean over bands of 10*log10(data_range^2 / band MSE); an identical band
// contributes +inf, making the mean +inf.
double psnr(const HsiCube& pred, const HsiCube& target, double data_range = 1.0);

// Single-scale SSIM per band (11x11 Gaussian window, sigma 1.5, K1 = 0.01,
// K2 = 0.03), averaged over valid window positions and bands.
double ssim(const HsiCube& pred, const HsiCube& target, double data_range = 1.0);

// Mean per-pixel spectral angle in degrees; zero-vector pairs contribute 0.
double sam_deg(const HsiCube& pred, const HsiCube& target);

// Mean per-band Pearson correlation. Bands with zero variance in either
// image are skipped; skipped_bands reports how many when non-null.
double cc(const HsiCube& pred, const HsiCube& target, int* skipped_bands = nullptr);

double rmse(const HsiCube& pred, const HsiCube& target);

// 100/scale_ratio * sqrt(mean over bands of (band RMSE / band target mean)^2).
// Bands whose target mean is exactly zero are skipped and counted.
double ergas(const HsiCube& pred, const HsiCube& target, double scale_ratio = 4.0,
             int* skipped_bands = nullptr);

// Texture sharpness: mean over bands of the spatial mean of 3x3-window
// variance (biased, divide-by-9), interior windows only. This definition is
// local to this library; values are comparable only within it.
double local_variation(const HsiCube& cube);

MetricReport report(const HsiCube& pred, const HsiCube& target,
                    const MetricOptions& options = {});

} // namespace gewdiff
