#include "gewdiff/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include "gewdiff/codec.hpp"

namespace gewdiff {

namespace {

constexpr int kQuantBins = 4;
constexpr size_t kMinRegionPixels = 8;

struct BilinearWeights {
    int lo, hi;
    double w_hi;
};

BilinearWeights sample_coord(int out_idx, int factor, int in_size) {
    double s = (out_idx + 0.5) / factor - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(in_size - 1));
    const int lo = static_cast<int>(std::floor(s));
    const int hi = std::min(lo + 1, in_size - 1);
    return {lo, hi, s - lo};
}

// 4-connected components of equal quantized bins, labeled in raster order.
std::vector<int> label_components(const std::vector<int>& bins, int h, int w) {
    std::vector<int> labels(bins.size(), -1);
    int next = 0;
    std::queue<int> frontier;
    for (size_t start = 0; start < bins.size(); ++start) {
        if (labels[start] >= 0) {
            continue;
        }
        labels[start] = next;
        frontier.push(static_cast<int>(start));
        while (!frontier.empty()) {
            const int p = frontier.front();
            frontier.pop();
            const int y = p / w;
            const int x = p % w;
            const int neighbors[4][2] = {{y - 1, x}, {y + 1, x}, {y, x - 1}, {y, x + 1}};
            for (const auto& n : neighbors) {
                if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w) {
                    continue;
                }
                const int q = n[0] * w + n[1];
                if (labels[q] < 0 && bins[q] == bins[p]) {
                    labels[q] = next;
                    frontier.push(q);
                }
            }
        }
        ++next;
    }
    return labels;
}

} // namespace

ImagePlane ndvi(const HsiCube& cube, int red_band, int nir_band) {
    if (red_band < 0 || red_band >= cube.bands || nir_band < 0 || nir_band >= cube.bands) {
        throw ValidationError("ndvi band index out of range");
    }
    if (red_band == nir_band) {
        throw ValidationError("ndvi needs distinct red and nir bands");
    }
    ImagePlane out(cube.height, cube.width);
    const size_t plane = cube.plane_size();
    const double* red = cube.data.data() + static_cast<size_t>(red_band) * plane;
    const double* nir = cube.data.data() + static_cast<size_t>(nir_band) * plane;
    for (size_t p = 0; p < plane; ++p) {
        const double denom = nir[p] + red[p];
        const double raw = (denom == 0.0) ? 0.0 : (nir[p] - red[p]) / denom;
        out.values[p] = std::clamp((raw + 1.0) / 2.0, 0.0, 1.0);
    }
    return out;
}

MaskMap mask_from_segments(const ImagePlane& ndvi_norm, const SegmentationMap& segs) {
    if (ndvi_norm.height != segs.height || ndvi_norm.width != segs.width) {
        throw ValidationError("ndvi map and segmentation shapes differ");
    }
    std::map<uint32_t, std::pair<double, size_t>> sums;  // label -> (sum, count)
    for (size_t p = 0; p < segs.labels.size(); ++p) {
        auto& acc = sums[segs.labels[p]];
        acc.first += ndvi_norm.values[p];
        acc.second += 1;
    }
    std::map<uint32_t, double> region_value;
    for (const auto& [label, acc] : sums) {
        region_value[label] = 1.0 - acc.first / static_cast<double>(acc.second);
    }
    MaskMap mask(segs.height, segs.width);
    for (size_t p = 0; p < segs.labels.size(); ++p) {
        mask.values[p] = region_value[segs.labels[p]];
    }
    return mask;
}

SegmentationMap fallback_segment(const ImagePlane& ndvi_norm) {
    const int h = ndvi_norm.height;
    const int w = ndvi_norm.width;
    if (h <= 0 || w <= 0) {
        throw ValidationError("fallback_segment needs a non-empty map");
    }

    std::vector<int> bins(ndvi_norm.values.size());
    for (size_t p = 0; p < bins.size(); ++p) {
        bins[p] = std::min(kQuantBins - 1,
                           static_cast<int>(std::floor(ndvi_norm.values[p] * kQuantBins)));
    }
    std::vector<int> labels = label_components(bins, h, w);
    const int count = *std::max_element(labels.begin(), labels.end()) + 1;

    std::vector<size_t> sizes(count, 0);
    for (int l : labels) {
        sizes[l] += 1;
    }

    // Merge undersized components into their largest neighbor, smallest label
    // breaking ties; repeat until stable.
    bool merged = true;
    while (merged) {
        merged = false;
        for (int small = 0; small < count; ++small) {
            if (sizes[small] == 0 || sizes[small] >= kMinRegionPixels) {
                continue;
            }
            int best = -1;
            size_t best_size = 0;
            for (int y = 0; y < h; ++y) {
                for (int x = 0; x < w; ++x) {
                    if (labels[y * w + x] != small) {
                        continue;
                    }
                    const int neighbors[4][2] = {{y - 1, x}, {y + 1, x}, {y, x - 1}, {y, x + 1}};
                    for (const auto& n : neighbors) {
                        if (n[0] < 0 || n[0] >= h || n[1] < 0 || n[1] >= w) {
                            continue;
                        }
                        const int other = labels[n[0] * w + n[1]];
                        if (other == small) {
                            continue;
                        }
                        if (sizes[other] > best_size ||
                            (sizes[other] == best_size && (best < 0 || other < best))) {
                            best = other;
                            best_size = sizes[other];
                        }
                    }
                }
            }
            if (best < 0) {
                continue;  // isolated tiny image, keep as-is
            }
            for (int& l : labels) {
                if (l == small) {
                    l = best;
                }
            }
            sizes[best] += sizes[small];
            sizes[small] = 0;
            merged = true;
        }
    }

    // Dense relabel in raster order of first occurrence.
    SegmentationMap segs(h, w);
    std::map<int, uint32_t> remap;
    uint32_t next = 0;
    for (size_t p = 0; p < labels.size(); ++p) {
        auto it = remap.find(labels[p]);
        if (it == remap.end()) {
            it = remap.emplace(labels[p], next++).first;
        }
        segs.labels[p] = it->second;
    }
    return segs;
}

LatentCube upsample_latent(const LatentCube& latent, int factor) {
    if (factor < 1) {
        throw ValidationError("upsample factor must be >= 1");
    }
    if (factor == 1) {
        return latent;
    }
    LatentCube out(latent.height * factor, latent.width * factor, latent.channels);
    const size_t in_plane = latent.plane_size();
    const size_t out_plane = out.plane_size();
    for (int oy = 0; oy < out.height; ++oy) {
        const auto wy = sample_coord(oy, factor, latent.height);
        for (int ox = 0; ox < out.width; ++ox) {
            const auto wx = sample_coord(ox, factor, latent.width);
            for (int c = 0; c < latent.channels; ++c) {
                const double* in = latent.data.data() + static_cast<size_t>(c) * in_plane;
                const double top = in[wy.lo * latent.width + wx.lo] * (1.0 - wx.w_hi) +
                                   in[wy.lo * latent.width + wx.hi] * wx.w_hi;
                const double bot = in[wy.hi * latent.width + wx.lo] * (1.0 - wx.w_hi) +
                                   in[wy.hi * latent.width + wx.hi] * wx.w_hi;
                out.data[static_cast<size_t>(c) * out_plane + static_cast<size_t>(oy) * out.width + ox] =
                    top * (1.0 - wy.w_hi) + bot * wy.w_hi;
            }
        }
    }
    return out;
}

ImagePlane upsample_plane(const ImagePlane& plane, int factor) {
    LatentCube tmp(plane.height, plane.width, 1);
    tmp.data = plane.values;
    const LatentCube up = upsample_latent(tmp, factor);
    ImagePlane out(up.height, up.width);
    out.values = up.data;
    return out;
}

SegmentationMap upsample_segments(const SegmentationMap& segs, int factor) {
    if (factor < 1) {
        throw ValidationError("upsample factor must be >= 1");
    }
    if (factor == 1) {
        return segs;
    }
    SegmentationMap out(segs.height * factor, segs.width * factor);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.at(y, x) = segs.at(y / factor, x / factor);
        }
    }
    return out;
}

ConditionSet build_conditions(const HsiCube& lr, const SegmentationMap* segs,
                              const LatentCodec& codec, const ConditioningConfig& cfg) {
    lr.validate();
    if (cfg.sr_factor < 1) {
        throw ValidationError("sr factor must be >= 1");
    }

    ConditionSet cond;
    cond.lr_latent = upsample_latent(codec.encode(lr), cfg.sr_factor);

    const ImagePlane ndvi_hr =
        upsample_plane(ndvi(lr, cfg.red_band, cfg.nir_band), cfg.sr_factor);

    SegmentationMap segments;
    if (segs != nullptr) {
        if (segs->height == ndvi_hr.height && segs->width == ndvi_hr.width) {
            segments = *segs;
        } else if (segs->height == lr.height && segs->width == lr.width) {
            segments = upsample_segments(*segs, cfg.sr_factor);
        } else {
            throw ValidationError("segmentation map matches neither LR nor target size");
        }
    } else {
        segments = fallback_segment(ndvi_hr);
    }

    cond.mask = mask_from_segments(ndvi_hr, segments);
    cond.edge = extract_edges(cond.lr_latent, cfg.edge_percentile, cfg.edge_dilate);
    return cond;
}

} // namespace gewdiff
