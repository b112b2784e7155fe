#pragma once

#include <optional>

#include "gewdiff/schedule.hpp"
#include "gewdiff/types.hpp"

namespace gewdiff {

struct RwaModel;
struct PcaModel;
struct LatentCodec;

// Region-constant values in [0,1]; 1 highlights non-vegetated (built-up) areas.
struct MaskMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    MaskMap() = default;
    MaskMap(int h, int w, double fill = 0.0)
        : height(h), width(w), values(static_cast<size_t>(h) * w, fill) {}

    double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return static_cast<size_t>(height) * width; }
};

// Everything the denoiser is conditioned on, all at target spatial size.
struct ConditionSet {
    LatentCube lr_latent;
    MaskMap mask;
    EdgeMap edge;  // training-time edge map, derived from the LR condition
};

struct ConditioningConfig {
    int red_band = 37;
    int nir_band = 68;
    int sr_factor = 4;
    double edge_percentile = 90.0;
    int edge_dilate = 1;
};

// Normalized vegetation index: raw (nir-red)/(nir+red) with 0 denominators
// mapping to 0, then rescaled to [0,1] via (raw+1)/2.
ImagePlane ndvi(const HsiCube& cube, int red_band, int nir_band);

// Per Eq.-style region aggregation: every pixel of region s gets
// 1 - mean(ndvi_norm over s).
MaskMap mask_from_segments(const ImagePlane& ndvi_norm, const SegmentationMap& segs);

// Deterministic stand-in for an external segmentation model: quantize
// ndvi_norm into 4 bins, label 4-connected components, then merge components
// smaller than 8 pixels into their largest neighbor (ties to the smallest
// label). Labels are dense, in raster order of first occurrence.
SegmentationMap fallback_segment(const ImagePlane& ndvi_norm);

// Bilinear upsampling by an integer factor, output pixel centers at
// (i + 0.5)/factor - 0.5 in input coordinates, borders replicated.
LatentCube upsample_latent(const LatentCube& latent, int factor);
ImagePlane upsample_plane(const ImagePlane& plane, int factor);

// Nearest-neighbor upsampling for label maps.
SegmentationMap upsample_segments(const SegmentationMap& segs, int factor);

// Assembles the condition set for one LR cube: project it through the fitted
// codec, upsample the latent, build mask (falling back to the deterministic
// segmenter when segs is absent; LR-sized maps are nearest-neighbor
// upsampled) and extract edges from the upsampled latent.
ConditionSet build_conditions(const HsiCube& lr, const SegmentationMap* segs,
                              const LatentCodec& codec, const ConditioningConfig& cfg);

} // namespace gewdiff
