#include "gewdiff/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace gewdiff {

namespace {

ImagePlane channel_mean(const LatentCube& cube) {
    ImagePlane mean(cube.height, cube.width, 0.0);
    const size_t plane = cube.plane_size();
    for (int c = 0; c < cube.channels; ++c) {
        const double* src = cube.data.data() + static_cast<size_t>(c) * plane;
        for (size_t p = 0; p < plane; ++p) {
            mean.values[p] += src[p];
        }
    }
    const double inv = 1.0 / cube.channels;
    for (double& v : mean.values) {
        v *= inv;
    }
    return mean;
}

// Sobel magnitude with replicated borders.
ImagePlane sobel_magnitude(const ImagePlane& img) {
    const int h = img.height;
    const int w = img.width;
    ImagePlane mag(h, w, 0.0);
    auto clamp_at = [&](int y, int x) {
        y = std::clamp(y, 0, h - 1);
        x = std::clamp(x, 0, w - 1);
        return img.at(y, x);
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = -clamp_at(y - 1, x - 1) + clamp_at(y - 1, x + 1) -
                              2.0 * clamp_at(y, x - 1) + 2.0 * clamp_at(y, x + 1) -
                              clamp_at(y + 1, x - 1) + clamp_at(y + 1, x + 1);
            const double gy = -clamp_at(y - 1, x - 1) - 2.0 * clamp_at(y - 1, x) -
                              clamp_at(y - 1, x + 1) + clamp_at(y + 1, x - 1) +
                              2.0 * clamp_at(y + 1, x) + clamp_at(y + 1, x + 1);
            mag.at(y, x) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return mag;
}

// Nearest-rank percentile of a copy of the values.
double percentile_of(std::vector<double> values, double percentile) {
    std::sort(values.begin(), values.end());
    const double rank = std::ceil(percentile / 100.0 * static_cast<double>(values.size()));
    const auto idx = static_cast<size_t>(
        std::clamp(rank - 1.0, 0.0, static_cast<double>(values.size() - 1)));
    return values[idx];
}

EdgeMap dilate_map(const EdgeMap& in, int iterations) {
    EdgeMap cur = in;
    for (int it = 0; it < iterations; ++it) {
        EdgeMap next = cur;
        for (int y = 0; y < cur.height; ++y) {
            for (int x = 0; x < cur.width; ++x) {
                if (cur.at(y, x) == 0) {
                    continue;
                }
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int ny = y + dy;
                        const int nx = x + dx;
                        if (ny >= 0 && ny < cur.height && nx >= 0 && nx < cur.width) {
                            next.at(ny, nx) = 1;
                        }
                    }
                }
            }
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace

void TrainNoiseConfig::validate() const {
    if (p_std <= 0.0) {
        throw ValidationError("p_std must be positive");
    }
    if (eta < 0.0 || eta > 1.0) {
        throw ValidationError("eta must lie in [0, 1]");
    }
    if (sigma_data <= 0.0) {
        throw ValidationError("sigma_data must be positive");
    }
}

void NoiseSchedule::validate() const {
    if (sigmas.size() < 2) {
        throw ValidationError("schedule needs at least 2 steps");
    }
    if (sigmas.front() != sigma_max || sigmas.back() != sigma_min) {
        throw ValidationError("schedule endpoints do not match sigma_max/sigma_min");
    }
    for (size_t i = 0; i < sigmas.size(); ++i) {
        if (!(sigmas[i] > 0.0)) {
            throw ValidationError("schedule sigmas must be positive");
        }
        if (i > 0 && !(sigmas[i] < sigmas[i - 1])) {
            throw ValidationError("schedule sigmas must be strictly decreasing");
        }
    }
}

double sample_sigma(Rng& rng, const TrainNoiseConfig& cfg) {
    cfg.validate();
    return std::exp(cfg.p_mean + cfg.p_std * rng.normal());
}

double t_of_sigma(double sigma) {
    if (!(sigma > 0.0)) {
        throw ValidationError("t_of_sigma requires sigma > 0");
    }
    return -std::log(sigma);
}

NoiseSchedule build_schedule(double sigma_max, double sigma_min, double rho, int steps) {
    if (!(sigma_max > sigma_min) || !(sigma_min > 0.0)) {
        throw ValidationError("need sigma_max > sigma_min > 0");
    }
    if (!(rho > 0.0)) {
        throw ValidationError("rho must be positive");
    }
    if (steps < 2) {
        throw ValidationError("schedule needs at least 2 steps");
    }

    NoiseSchedule schedule;
    schedule.rho = rho;
    schedule.sigma_max = sigma_max;
    schedule.sigma_min = sigma_min;
    schedule.sigmas.resize(steps);

    const double inv_rho = 1.0 / rho;
    const double hi = std::pow(sigma_max, inv_rho);
    const double lo = std::pow(sigma_min, inv_rho);
    for (int n = 1; n + 1 < steps; ++n) {
        const double frac = static_cast<double>(n) / static_cast<double>(steps - 1);
        schedule.sigmas[n] = std::pow(hi + frac * (lo - hi), rho);
    }
    // Endpoints by construction, exact.
    schedule.sigmas.front() = sigma_max;
    schedule.sigmas.back() = sigma_min;
    schedule.validate();
    return schedule;
}

LatentCube edge_aware_perturb(const LatentCube& z0, double sigma_t, const EdgeMap& edge,
                              const TrainNoiseConfig& cfg, double sigma_max, Rng& rng) {
    cfg.validate();
    if (!(sigma_t > 0.0)) {
        throw ValidationError("edge_aware_perturb requires sigma_t > 0");
    }
    if (edge.height != z0.height || edge.width != z0.width) {
        throw ValidationError("edge map shape does not match the latent");
    }
    const double sigma_norm = std::clamp(sigma_t / sigma_max, 0.0, 1.0);
    const double edge_scale = (1.0 - sigma_norm * sigma_norm) * cfg.eta;

    LatentCube out = z0;
    const size_t plane = z0.plane_size();
    for (int c = 0; c < z0.channels; ++c) {
        double* dst = out.data.data() + static_cast<size_t>(c) * plane;
        for (size_t p = 0; p < plane; ++p) {
            const double multiplier = 1.0 - (edge.values[p] ? edge_scale : 0.0);
            dst[p] += sigma_t * rng.normal() * multiplier;
        }
    }
    return out;
}

EdgeMap extract_edges(const LatentCube& cube, double percentile, int dilate) {
    if (cube.height < 3 || cube.width < 3) {
        throw ValidationError("edge extraction needs height and width >= 3");
    }
    if (percentile < 0.0 || percentile > 100.0) {
        throw ValidationError("percentile must lie in [0, 100]");
    }
    const ImagePlane mag = sobel_magnitude(channel_mean(cube));
    const double threshold = percentile_of(mag.values, percentile);

    EdgeMap edges(cube.height, cube.width, 0);
    for (size_t p = 0; p < mag.values.size(); ++p) {
        edges.values[p] = (mag.values[p] >= threshold && mag.values[p] > 0.0) ? 1 : 0;
    }
    return dilate > 0 ? dilate_map(edges, dilate) : edges;
}

EdgeMap extract_edges(const HsiCube& cube, double percentile, int dilate) {
    return extract_edges(to_latent(cube), percentile, dilate);
}

} // namespace gewdiff
