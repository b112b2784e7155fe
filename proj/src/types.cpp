#include "gewdiff/types.hpp"

namespace gewdiff {

namespace {

void check_dims(int height, int width, int depth, size_t actual,
                const char* depth_name) {
    if (height <= 0 || width <= 0 || depth <= 0) {
        throw ValidationError(std::string("raster dimensions must be positive (") +
                              std::to_string(height) + "x" + std::to_string(width) +
                              "x" + std::to_string(depth) + " " + depth_name + ")");
    }
    const size_t expected = static_cast<size_t>(height) * width * depth;
    if (actual != expected) {
        throw ValidationError("payload length mismatch: expected " +
                              std::to_string(expected) + " values, got " +
                              std::to_string(actual));
    }
}

} // namespace

void HsiCube::validate() const {
    check_dims(height, width, bands, data.size(), "bands");
    ensure_finite(data, "cube payload");
}

void LatentCube::validate() const {
    check_dims(height, width, channels, data.size(), "channels");
    ensure_finite(data, "latent payload");
}

void SegmentationMap::validate() const {
    if (height <= 0 || width <= 0) {
        throw ValidationError("segmentation dimensions must be positive");
    }
    if (labels.size() != static_cast<size_t>(height) * width) {
        throw ValidationError("segmentation payload length mismatch");
    }
}

LatentCube to_latent(const HsiCube& cube) {
    LatentCube out;
    out.height = cube.height;
    out.width = cube.width;
    out.channels = cube.bands;
    out.data = cube.data;
    return out;
}

HsiCube to_cube(const LatentCube& latent) {
    HsiCube out;
    out.height = latent.height;
    out.width = latent.width;
    out.bands = latent.channels;
    out.data = latent.data;
    return out;
}

void ensure_finite(const std::vector<double>& values, const std::string& context) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NumericError("non-finite value in " + context);
        }
    }
}

} // namespace gewdiff
