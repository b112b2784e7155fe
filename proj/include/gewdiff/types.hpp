#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace gewdiff {

// Error categories map to CLI exit codes: validation -> 2, I/O -> 3, numeric -> 4.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ============================================================================
// HsiCube - hyperspectral raster, band-sequential (BSQ) layout
//   data[(b * height + y) * width + x]
// Values are reflectance (digital numbers divided by the file scale factor).
// ============================================================================
struct HsiCube {
    int height = 0;
    int width = 0;
    int bands = 0;
    std::vector<double> data;

    HsiCube() = default;
    HsiCube(int h, int w, int b, double fill = 0.0)
        : height(h), width(w), bands(b),
          data(static_cast<size_t>(h) * w * b, fill) {}

    double& at(int b, int y, int x) {
        return data[(static_cast<size_t>(b) * height + y) * width + x];
    }
    double at(int b, int y, int x) const {
        return data[(static_cast<size_t>(b) * height + y) * width + x];
    }

    size_t plane_size() const { return static_cast<size_t>(height) * width; }
    size_t size() const { return static_cast<size_t>(height) * width * bands; }

    void validate() const;
};

// Latent-space raster, same layout with channels instead of spectral bands.
struct LatentCube {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<double> data;

    LatentCube() = default;
    LatentCube(int h, int w, int c, double fill = 0.0)
        : height(h), width(w), channels(c),
          data(static_cast<size_t>(h) * w * c, fill) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<size_t>(c) * height + y) * width + x];
    }

    size_t plane_size() const { return static_cast<size_t>(height) * width; }
    size_t size() const { return static_cast<size_t>(height) * width * channels; }

    void validate() const;
};

// Per-pixel region ids. Labels may be sparse; every pixel carries exactly one.
struct SegmentationMap {
    int height = 0;
    int width = 0;
    std::vector<uint32_t> labels;

    SegmentationMap() = default;
    SegmentationMap(int h, int w, uint32_t fill = 0)
        : height(h), width(w), labels(static_cast<size_t>(h) * w, fill) {}

    uint32_t& at(int y, int x) { return labels[static_cast<size_t>(y) * width + x]; }
    uint32_t at(int y, int x) const { return labels[static_cast<size_t>(y) * width + x]; }

    size_t size() const { return static_cast<size_t>(height) * width; }

    void validate() const;
};

// Single-band real-valued map (NDVI, masks and friends).
struct ImagePlane {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    ImagePlane() = default;
    ImagePlane(int h, int w, double fill = 0.0)
        : height(h), width(w), values(static_cast<size_t>(h) * w, fill) {}

    double& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }

    size_t size() const { return static_cast<size_t>(height) * width; }
};

LatentCube to_latent(const HsiCube& cube);
HsiCube to_cube(const LatentCube& latent);

// Throws NumericError naming `context` if any value is NaN or Inf.
void ensure_finite(const std::vector<double>& values, const std::string& context);

} // namespace gewdiff
