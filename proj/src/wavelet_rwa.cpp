#include "gewdiff/wavelet_rwa.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace gewdiff {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
constexpr double kSvdCutoff = 1e-10;

WaveletLevel haar_forward_impl(const LatentCube& spectrum) {
    if (spectrum.channels < 2) {
        throw ValidationError("haar_forward needs at least 2 channels, got " +
                              std::to_string(spectrum.channels));
    }
    const int pairs = spectrum.channels / 2;
    const bool odd = (spectrum.channels % 2) != 0;

    WaveletLevel level;
    level.approx = LatentCube(spectrum.height, spectrum.width, pairs + (odd ? 1 : 0));
    level.detail = LatentCube(spectrum.height, spectrum.width, pairs);

    const size_t plane = spectrum.plane_size();
    for (int m = 0; m < pairs; ++m) {
        const double* lo = spectrum.data.data() + static_cast<size_t>(2 * m) * plane;
        const double* hi = spectrum.data.data() + static_cast<size_t>(2 * m + 1) * plane;
        double* a = level.approx.data.data() + static_cast<size_t>(m) * plane;
        double* d = level.detail.data.data() + static_cast<size_t>(m) * plane;
        for (size_t p = 0; p < plane; ++p) {
            a[p] = (lo[p] + hi[p]) * kInvSqrt2;
            d[p] = (lo[p] - hi[p]) * kInvSqrt2;
        }
    }
    if (odd) {
        const double* last = spectrum.data.data() +
                             static_cast<size_t>(spectrum.channels - 1) * plane;
        double* a = level.approx.data.data() + static_cast<size_t>(pairs) * plane;
        std::copy(last, last + plane, a);
    }
    return level;
}

} // namespace

void RwaModel::validate() const {
    if (levels < 1) {
        throw ValidationError("rwa model must have at least one level");
    }
    if (betas.size() != static_cast<size_t>(levels) ||
        band_counts.size() != static_cast<size_t>(levels)) {
        throw ValidationError("rwa model level bookkeeping mismatch");
    }
    for (int j = 0; j < levels; ++j) {
        const int parent = band_counts[j];
        const int details = parent / 2;
        const int approx = details + (parent % 2);
        if (betas[j].size() != static_cast<size_t>(details)) {
            throw ValidationError("beta row count mismatch at level " + std::to_string(j + 1));
        }
        for (const auto& row : betas[j]) {
            if (row.size() != static_cast<size_t>(approx + 1)) {
                throw ValidationError("beta column count mismatch at level " +
                                      std::to_string(j + 1));
            }
            ensure_finite(row, "regression coefficients");
        }
    }
}

WaveletLevel haar_forward(const LatentCube& spectrum) {
    return haar_forward_impl(spectrum);
}

WaveletLevel haar_forward(const HsiCube& cube) {
    return haar_forward_impl(to_latent(cube));
}

LatentCube haar_inverse(const WaveletLevel& level) {
    const int diff = level.approx.channels - level.detail.channels;
    if (diff < 0 || diff > 1) {
        throw ValidationError("approx/detail channel counts differ by " +
                              std::to_string(diff) + "; expected 0 or 1");
    }
    if (level.approx.height != level.detail.height ||
        level.approx.width != level.detail.width) {
        throw ValidationError("approx/detail spatial shapes differ");
    }
    const int pairs = level.detail.channels;
    LatentCube out(level.approx.height, level.approx.width, 2 * pairs + diff);

    const size_t plane = out.plane_size();
    for (int m = 0; m < pairs; ++m) {
        const double* a = level.approx.data.data() + static_cast<size_t>(m) * plane;
        const double* d = level.detail.data.data() + static_cast<size_t>(m) * plane;
        double* lo = out.data.data() + static_cast<size_t>(2 * m) * plane;
        double* hi = out.data.data() + static_cast<size_t>(2 * m + 1) * plane;
        for (size_t p = 0; p < plane; ++p) {
            lo[p] = (a[p] + d[p]) * kInvSqrt2;
            hi[p] = (a[p] - d[p]) * kInvSqrt2;
        }
    }
    if (diff == 1) {
        const double* a = level.approx.data.data() + static_cast<size_t>(pairs) * plane;
        double* last = out.data.data() + static_cast<size_t>(2 * pairs) * plane;
        std::copy(a, a + plane, last);
    }
    return out;
}

std::vector<std::vector<double>> fit_regression(const WaveletLevel& level) {
    if (level.detail.channels < 1) {
        throw ValidationError("fit_regression needs at least one detail channel");
    }
    const int predictors = level.approx.channels;
    const auto pixels = static_cast<Eigen::Index>(level.approx.plane_size());
    if (pixels < predictors + 1) {
        throw ValidationError("too few pixels for the design matrix: " +
                              std::to_string(pixels) + " < " +
                              std::to_string(predictors + 1));
    }

    Eigen::MatrixXd design(pixels, predictors + 1);
    design.col(0).setOnes();
    for (int k = 0; k < predictors; ++k) {
        design.col(k + 1) = Eigen::Map<const Eigen::VectorXd>(
            level.approx.data.data() + static_cast<size_t>(k) * level.approx.plane_size(),
            pixels);
    }
    Eigen::MatrixXd targets(pixels, level.detail.channels);
    for (int i = 0; i < level.detail.channels; ++i) {
        targets.col(i) = Eigen::Map<const Eigen::VectorXd>(
            level.detail.data.data() + static_cast<size_t>(i) * level.detail.plane_size(),
            pixels);
    }

    // Minimum-norm least squares; tiny singular values (constant bands) are
    // dropped so the fit stays deterministic under rank deficiency.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kSvdCutoff);
    const Eigen::MatrixXd coeffs = svd.solve(targets);

    std::vector<std::vector<double>> betas(level.detail.channels,
                                           std::vector<double>(predictors + 1));
    for (int i = 0; i < level.detail.channels; ++i) {
        for (int c = 0; c <= predictors; ++c) {
            betas[i][c] = coeffs(c, i);
        }
    }
    return betas;
}

LatentCube predict_details(const LatentCube& approx,
                           const std::vector<std::vector<double>>& betas) {
    for (const auto& row : betas) {
        if (row.size() != static_cast<size_t>(approx.channels + 1)) {
            throw ValidationError("beta width does not match approx channel count");
        }
    }
    LatentCube pred(approx.height, approx.width, static_cast<int>(betas.size()));
    const size_t plane = approx.plane_size();
    for (size_t i = 0; i < betas.size(); ++i) {
        double* out = pred.data.data() + i * plane;
        std::fill(out, out + plane, betas[i][0]);
        for (int k = 0; k < approx.channels; ++k) {
            const double w = betas[i][k + 1];
            if (w == 0.0) {
                continue;
            }
            const double* in = approx.data.data() + static_cast<size_t>(k) * plane;
            for (size_t p = 0; p < plane; ++p) {
                out[p] += w * in[p];
            }
        }
    }
    return pred;
}

RwaEncoding rwa_encode(const HsiCube& cube, int levels, bool keep_residuals) {
    if (levels < 1) {
        throw ValidationError("rwa_encode needs levels >= 1");
    }
    cube.validate();

    RwaEncoding enc;
    if (keep_residuals) {
        enc.residuals.emplace();
    }

    LatentCube running = to_latent(cube);
    for (int j = 0; j < levels && running.channels >= 2; ++j) {
        WaveletLevel level = haar_forward(running);
        auto betas = fit_regression(level);

        if (keep_residuals) {
            LatentCube pred = predict_details(level.approx, betas);
            LatentCube residual = level.detail;
            for (size_t i = 0; i < residual.data.size(); ++i) {
                residual.data[i] -= pred.data[i];
            }
            enc.residuals->push_back(std::move(residual));
        }

        enc.model.band_counts.push_back(running.channels);
        enc.model.betas.push_back(std::move(betas));
        enc.model.levels += 1;
        running = std::move(level.approx);
    }
    enc.approx_top = std::move(running);
    enc.model.validate();
    return enc;
}

HsiCube rwa_decode(const RwaEncoding& encoding, bool zero_residuals) {
    const RwaModel& model = encoding.model;
    model.validate();
    const bool use_residuals = !zero_residuals && encoding.residuals.has_value();
    if (use_residuals &&
        encoding.residuals->size() != static_cast<size_t>(model.levels)) {
        throw ValidationError("residual level count does not match the model");
    }

    LatentCube running = encoding.approx_top;
    for (int j = model.levels - 1; j >= 0; --j) {
        const int parent = model.band_counts[j];
        const int details = parent / 2;
        const int approx = details + (parent % 2);
        if (running.channels != approx) {
            throw ValidationError("approx channels at level " + std::to_string(j + 1) +
                                  " do not match the model: " +
                                  std::to_string(running.channels) + " vs " +
                                  std::to_string(approx));
        }

        WaveletLevel level;
        level.detail = predict_details(running, model.betas[j]);
        if (use_residuals) {
            const LatentCube& residual = (*encoding.residuals)[j];
            if (residual.channels != level.detail.channels ||
                residual.height != level.detail.height ||
                residual.width != level.detail.width) {
                throw ValidationError("residual shape mismatch at level " +
                                      std::to_string(j + 1));
            }
            for (size_t i = 0; i < level.detail.data.size(); ++i) {
                level.detail.data[i] += residual.data[i];
            }
        }
        level.approx = std::move(running);
        running = haar_inverse(level);
    }
    return to_cube(running);
}

} // namespace gewdiff
