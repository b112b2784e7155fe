#include "gewdiff/pca.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace gewdiff {

namespace {

// Pixel-major view of a BSQ cube: row p = channel vector of pixel p.
Eigen::MatrixXd as_pixel_matrix(const LatentCube& cube) {
    const auto pixels = static_cast<Eigen::Index>(cube.plane_size());
    Eigen::MatrixXd m(pixels, cube.channels);
    for (int c = 0; c < cube.channels; ++c) {
        m.col(c) = Eigen::Map<const Eigen::VectorXd>(
            cube.data.data() + static_cast<size_t>(c) * cube.plane_size(), pixels);
    }
    return m;
}

} // namespace

void PcaModel::validate() const {
    if (retained < 1 || retained > channels()) {
        throw ValidationError("pca model retained count out of range");
    }
    if (loadings.size() != static_cast<size_t>(retained) ||
        eigenvalues.size() != static_cast<size_t>(retained)) {
        throw ValidationError("pca model shape bookkeeping mismatch");
    }
    for (const auto& row : loadings) {
        if (row.size() != mean.size()) {
            throw ValidationError("pca loading row length mismatch");
        }
        ensure_finite(row, "pca loadings");
    }
    ensure_finite(mean, "pca mean");
    for (size_t i = 0; i + 1 < eigenvalues.size(); ++i) {
        if (eigenvalues[i] + 1e-12 < eigenvalues[i + 1]) {
            throw ValidationError("pca eigenvalues must be non-increasing");
        }
    }
}

PcaModel pca_fit(const LatentCube& cube, int k) {
    cube.validate();
    if (k < 1 || k > cube.channels) {
        throw ValidationError("pca k must be in [1, channels], got " + std::to_string(k));
    }
    const auto pixels = static_cast<Eigen::Index>(cube.plane_size());
    if (pixels < 2) {
        throw ValidationError("pca_fit needs at least 2 pixels");
    }

    Eigen::MatrixXd samples = as_pixel_matrix(cube);
    const Eigen::RowVectorXd mean = samples.colwise().mean();
    samples.rowwise() -= mean;

    // Full V so k may exceed the data rank; surplus directions come back with
    // zero variance and still form an orthonormal basis.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(samples, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd singular = svd.singularValues();
    const Eigen::MatrixXd v = svd.matrixV();

    PcaModel model;
    model.retained = k;
    model.mean.assign(mean.data(), mean.data() + mean.size());
    model.loadings.resize(k);
    model.eigenvalues.resize(k);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd dir = v.col(i);
        int max_idx = 0;
        dir.cwiseAbs().maxCoeff(&max_idx);
        if (dir(max_idx) < 0.0) {
            dir = -dir;
        }
        model.loadings[i].assign(dir.data(), dir.data() + dir.size());
        const double s = (i < singular.size()) ? singular(i) : 0.0;
        model.eigenvalues[i] = s * s / static_cast<double>(pixels - 1);
    }
    model.validate();
    return model;
}

LatentCube pca_project(const LatentCube& cube, const PcaModel& model) {
    model.validate();
    if (cube.channels != model.channels()) {
        throw ValidationError("pca_project channel mismatch: cube has " +
                              std::to_string(cube.channels) + ", model expects " +
                              std::to_string(model.channels()));
    }
    const size_t plane = cube.plane_size();
    LatentCube out(cube.height, cube.width, model.retained);
    for (int i = 0; i < model.retained; ++i) {
        double* z = out.data.data() + static_cast<size_t>(i) * plane;
        std::fill(z, z + plane, 0.0);
        for (int c = 0; c < cube.channels; ++c) {
            const double w = model.loadings[i][c];
            const double m = model.mean[c];
            const double* x = cube.data.data() + static_cast<size_t>(c) * plane;
            for (size_t p = 0; p < plane; ++p) {
                z[p] += w * (x[p] - m);
            }
        }
    }
    return out;
}

LatentCube pca_inverse(const LatentCube& latent, const PcaModel& model) {
    model.validate();
    if (latent.channels != model.retained) {
        throw ValidationError("pca_inverse channel mismatch: latent has " +
                              std::to_string(latent.channels) + ", model retains " +
                              std::to_string(model.retained));
    }
    const size_t plane = latent.plane_size();
    LatentCube out(latent.height, latent.width, model.channels());
    for (int c = 0; c < model.channels(); ++c) {
        double* x = out.data.data() + static_cast<size_t>(c) * plane;
        std::fill(x, x + plane, model.mean[c]);
        for (int i = 0; i < model.retained; ++i) {
            const double w = model.loadings[i][c];
            if (w == 0.0) {
                continue;
            }
            const double* z = latent.data.data() + static_cast<size_t>(i) * plane;
            for (size_t p = 0; p < plane; ++p) {
                x[p] += w * z[p];
            }
        }
    }
    return out;
}

} // namespace gewdiff
