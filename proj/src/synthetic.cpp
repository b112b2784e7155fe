#include "gewdiff/synthetic.hpp"

#include <cmath>
#include <limits>

#include "gewdiff/rng.hpp"

namespace gewdiff {

namespace {

double gauss_bump(double band, double center, double width) {
    const double d = (band - center) / width;
    return std::exp(-0.5 * d * d);
}

} // namespace

SyntheticScene gen_synthetic(const SyntheticConfig& cfg) {
    if (cfg.height < 1 || cfg.width < 1 || cfg.bands < 1 || cfg.num_segments < 1) {
        throw ValidationError("synthetic scene dimensions must be positive");
    }
    Rng rng(cfg.seed);
    const int h = cfg.height;
    const int w = cfg.width;
    const int bands = cfg.bands;

    // Voronoi sites -> piecewise-constant segment map, ties to the first site.
    std::vector<std::pair<double, double>> sites(cfg.num_segments);
    for (auto& s : sites) {
        s.first = rng.uniform(0.0, h);
        s.second = rng.uniform(0.0, w);
    }
    SegmentationMap segments(h, w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double best = std::numeric_limits<double>::infinity();
            uint32_t label = 0;
            for (size_t s = 0; s < sites.size(); ++s) {
                const double dy = y + 0.5 - sites[s].first;
                const double dx = x + 0.5 - sites[s].second;
                const double d2 = dy * dy + dx * dx;
                if (d2 < best) {
                    best = d2;
                    label = static_cast<uint32_t>(s);
                }
            }
            segments.at(y, x) = label;
        }
    }

    // One smooth base spectrum per segment.
    std::vector<std::vector<double>> base(cfg.num_segments, std::vector<double>(bands, 0.1));
    for (auto& spectrum : base) {
        for (int bump = 0; bump < 3; ++bump) {
            const double amp = rng.uniform(0.1, 0.5);
            const double center = rng.uniform(0.0, bands - 1.0);
            const double width = rng.uniform(bands / 24.0, bands / 8.0);
            for (int b = 0; b < bands; ++b) {
                spectrum[b] += amp * gauss_bump(b, center, width);
            }
        }
    }

    HsiCube cube(h, w, bands);
    const size_t plane = cube.plane_size();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t p = static_cast<size_t>(y) * w + x;
            const auto& spectrum = base[segments.at(y, x)];
            const double brightness = 1.0 + cfg.brightness_spread * rng.normal();

            // Two texture bumps with per-pixel centers and widths.
            double amp[2], center[2], width[2];
            for (int i = 0; i < 2; ++i) {
                amp[i] = cfg.texture_amplitude * rng.normal();
                center[i] = rng.uniform(0.0, bands - 1.0);
                width[i] = rng.uniform(bands / 16.0, bands / 6.0);
            }
            for (int b = 0; b < bands; ++b) {
                double v = spectrum[b] * brightness;
                for (int i = 0; i < 2; ++i) {
                    v += amp[i] * gauss_bump(b, center[i], width[i]);
                }
                cube.data[static_cast<size_t>(b) * plane + p] = v;
            }
        }
    }
    cube.validate();
    return {std::move(cube), std::move(segments)};
}

} // namespace gewdiff
