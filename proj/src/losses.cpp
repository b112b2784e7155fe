#include "gewdiff/losses.hpp"

#include <cmath>

namespace gewdiff {

namespace {

void check_shapes(const LatentCube& a, const LatentCube& b) {
    if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
        throw ValidationError("loss inputs must share height/width/channels");
    }
}

double clipped_angle(double dot, double na, double nb) {
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    const double c = std::clamp(dot / (na * nb), -1.0, 1.0);
    return std::acos(c);
}

LatentCube avg_pool2(const LatentCube& in) {
    const int oh = (in.height + 1) / 2;
    const int ow = (in.width + 1) / 2;
    LatentCube out(oh, ow, in.channels);
    for (int c = 0; c < in.channels; ++c) {
        for (int oy = 0; oy < oh; ++oy) {
            for (int ox = 0; ox < ow; ++ox) {
                double sum = 0.0;
                int count = 0;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const int y = 2 * oy + dy;
                        const int x = 2 * ox + dx;
                        if (y < in.height && x < in.width) {
                            sum += in.at(c, y, x);
                            ++count;
                        }
                    }
                }
                out.at(c, oy, ox) = sum / count;
            }
        }
    }
    return out;
}

} // namespace

void LossWeights::validate() const {
    if (lambda1 < 0.0 || lambda2 < 0.0 || lambda3 < 0.0) {
        throw ValidationError("loss weights must be non-negative");
    }
    if (!(sigma_data > 0.0)) {
        throw ValidationError("sigma_data must be positive");
    }
}

FeatureExtractorFn make_pyramid_extractor() {
    return [](const LatentCube& input) {
        std::vector<double> features;
        LatentCube level = avg_pool2(input);
        for (int scale = 0; scale < 3; ++scale) {
            features.insert(features.end(), level.data.begin(), level.data.end());
            if (scale + 1 < 3) {
                level = avg_pool2(level);
            }
        }
        return features;
    };
}

double pixel_loss(const LatentCube& pred, const LatentCube& target) {
    check_shapes(pred, target);
    double sq_sum = 0.0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        sq_sum += d * d;
    }
    const double mse = sq_sum / static_cast<double>(pred.data.size());

    const size_t plane = pred.plane_size();
    double angle_sum = 0.0;
    for (size_t p = 0; p < plane; ++p) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (int c = 0; c < pred.channels; ++c) {
            const double a = pred.data[static_cast<size_t>(c) * plane + p];
            const double b = target.data[static_cast<size_t>(c) * plane + p];
            dot += a * b;
            na += a * a;
            nb += b * b;
        }
        angle_sum += clipped_angle(dot, std::sqrt(na), std::sqrt(nb));
    }
    const double sam = angle_sum / static_cast<double>(plane);
    return (mse + sam) / 2.0;
}

double perceptual_loss(const LatentCube& pred, const LatentCube& target,
                       const FeatureExtractorFn& extractor) {
    check_shapes(pred, target);
    const std::vector<double> fp = extractor(pred);
    const std::vector<double> ft = extractor(target);
    if (fp.size() != ft.size()) {
        throw ValidationError("feature extractor returned mismatched feature lengths");
    }
    if (fp.empty()) {
        throw ValidationError("feature extractor returned no features");
    }
    double sum = 0.0;
    for (size_t i = 0; i < fp.size(); ++i) {
        const double d = fp[i] - ft[i];
        sum += d * d;
    }
    return sum / static_cast<double>(fp.size());
}

double gradient_loss(const LatentCube& pred, const LatentCube& target) {
    check_shapes(pred, target);
    if (pred.height < 2 || pred.width < 2) {
        throw ValidationError("gradient loss needs height and width >= 2");
    }
    double sum_x = 0.0;
    double sum_y = 0.0;
    for (int c = 0; c < pred.channels; ++c) {
        for (int y = 0; y < pred.height; ++y) {
            for (int x = 0; x + 1 < pred.width; ++x) {
                const double gp = pred.at(c, y, x + 1) - pred.at(c, y, x);
                const double gt = target.at(c, y, x + 1) - target.at(c, y, x);
                sum_x += std::abs(gp - gt);
            }
        }
        for (int y = 0; y + 1 < pred.height; ++y) {
            for (int x = 0; x < pred.width; ++x) {
                const double gp = pred.at(c, y + 1, x) - pred.at(c, y, x);
                const double gt = target.at(c, y + 1, x) - target.at(c, y, x);
                sum_y += std::abs(gp - gt);
            }
        }
    }
    const double count_x = static_cast<double>(pred.channels) * pred.height * (pred.width - 1);
    const double count_y = static_cast<double>(pred.channels) * (pred.height - 1) * pred.width;
    return 0.5 * (sum_x / count_x + sum_y / count_y);
}

double loss_weight(double sigma, double sigma_data) {
    if (!(sigma > 0.0)) {
        throw ValidationError("loss weighting requires sigma > 0");
    }
    const double denom = sigma * sigma_data;
    return (sigma * sigma + sigma_data * sigma_data) / (denom * denom);
}

double total_loss(const LatentCube& pred, const LatentCube& target,
                  const FeatureExtractorFn& extractor, const LossWeights& weights,
                  double sigma_t) {
    weights.validate();
    const double pixel = pixel_loss(pred, target);
    const double perceptual = perceptual_loss(pred, target, extractor);
    const double gradient = gradient_loss(pred, target);
    return loss_weight(sigma_t, weights.sigma_data) *
           (weights.lambda1 * pixel + weights.lambda2 * perceptual +
            weights.lambda3 * gradient);
}

} // namespace gewdiff
