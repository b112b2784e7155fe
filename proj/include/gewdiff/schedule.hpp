#pragma once

#include <cstdint>
#include <vector>

#include "gewdiff/rng.hpp"
#include "gewdiff/types.hpp"

namespace gewdiff {

// Training-time noise parameters: lognormal sigma draws plus the edge
// perturbation strength.
struct TrainNoiseConfig {
    double p_mean = -1.2;
    double p_std = 1.2;
    double eta = 0.5;
    double sigma_data = 0.5;

    void validate() const;
};

// Strictly decreasing sigma grid for sampling. Endpoints are pinned to
// sigma_max / sigma_min exactly.
struct NoiseSchedule {
    std::vector<double> sigmas;
    double rho = 0.0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;

    int steps() const { return static_cast<int>(sigmas.size()); }
    void validate() const;
};

struct EdgeMap {
    int height = 0;
    int width = 0;
    std::vector<uint8_t> values;  // binary {0,1}

    EdgeMap() = default;
    EdgeMap(int h, int w, uint8_t fill = 0)
        : height(h), width(w), values(static_cast<size_t>(h) * w, fill) {}

    uint8_t& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return static_cast<size_t>(height) * width; }
};

// Noise strength draw: exp(p_mean + p_std * n), n standard normal.
double sample_sigma(Rng& rng, const TrainNoiseConfig& cfg);

// Continuous time variable t = -log(sigma); strictly decreasing in sigma.
double t_of_sigma(double sigma);

// Curved grid between sigma_max and sigma_min:
//   sigma_n = (sigma_max^(1/rho) + n/(N-1) * (sigma_min^(1/rho) - sigma_max^(1/rho)))^rho
// rho = 1 degenerates to linear interpolation.
NoiseSchedule build_schedule(double sigma_max, double sigma_min, double rho, int steps);

// Forward perturbation with reduced noise on edge pixels:
//   z_t = z0 + sigma_t * eps * (1 - E * (1 - sigma_norm^2) * eta)
// where sigma_norm = clamp(sigma_t / sigma_max, 0, 1) and the edge map
// broadcasts over channels. Fresh noise is drawn on every call.
LatentCube edge_aware_perturb(const LatentCube& z0, double sigma_t, const EdgeMap& edge,
                              const TrainNoiseConfig& cfg, double sigma_max, Rng& rng);

// Sobel gradient magnitude of the channel-mean image, thresholded at the
// given percentile and dilated. Pixels at the threshold count as edges
// unless their magnitude is zero, so a flat image yields an empty map.
EdgeMap extract_edges(const LatentCube& cube, double percentile = 90.0, int dilate = 1);
EdgeMap extract_edges(const HsiCube& cube, double percentile = 90.0, int dilate = 1);

} // namespace gewdiff
