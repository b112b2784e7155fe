#include "gewdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace gewdiff {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kDegPerRad = 57.295779513082320876798154814105;

void check_shapes(const HsiCube& a, const HsiCube& b) {
    if (a.height != b.height || a.width != b.width || a.bands != b.bands) {
        throw ValidationError("metric inputs must share height/width/bands");
    }
}

double band_mse(const HsiCube& pred, const HsiCube& target, int band) {
    const size_t plane = pred.plane_size();
    const double* p = pred.data.data() + static_cast<size_t>(band) * plane;
    const double* t = target.data.data() + static_cast<size_t>(band) * plane;
    double sum = 0.0;
    for (size_t i = 0; i < plane; ++i) {
        const double d = p[i] - t[i];
        sum += d * d;
    }
    return sum / static_cast<double>(plane);
}

std::vector<double> gaussian_window() {
    std::vector<double> w(static_cast<size_t>(kSsimWindow) * kSsimWindow);
    const int half = kSsimWindow / 2;
    double sum = 0.0;
    for (int y = 0; y < kSsimWindow; ++y) {
        for (int x = 0; x < kSsimWindow; ++x) {
            const double dy = y - half;
            const double dx = x - half;
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kSsimSigma * kSsimSigma));
            w[static_cast<size_t>(y) * kSsimWindow + x] = v;
            sum += v;
        }
    }
    for (double& v : w) {
        v /= sum;
    }
    return w;
}

std::string format_metric(double v) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

} // namespace

std::string MetricReport::csv_header() {
    return "psnr,ssim,sam_deg,cc,rmse,ergas,lv,skipped_bands";
}

std::string MetricReport::csv_row() const {
    std::ostringstream os;
    os << format_metric(psnr) << ',' << format_metric(ssim) << ','
       << format_metric(sam_deg) << ',' << format_metric(cc) << ','
       << format_metric(rmse) << ',' << format_metric(ergas) << ','
       << format_metric(lv) << ',' << skipped_bands;
    return os.str();
}

double psnr(const HsiCube& pred, const HsiCube& target, double data_range) {
    check_shapes(pred, target);
    if (!(data_range > 0.0)) {
        throw ValidationError("psnr data_range must be positive");
    }
    double sum = 0.0;
    for (int b = 0; b < pred.bands; ++b) {
        const double mse = band_mse(pred, target, b);
        if (mse == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        sum += 10.0 * std::log10(data_range * data_range / mse);
    }
    return sum / pred.bands;
}

double ssim(const HsiCube& pred, const HsiCube& target, double data_range) {
    check_shapes(pred, target);
    if (pred.height < kSsimWindow || pred.width < kSsimWindow) {
        throw ValidationError("ssim needs height and width >= 11");
    }
    const std::vector<double> window = gaussian_window();
    const double c1 = (kSsimK1 * data_range) * (kSsimK1 * data_range);
    const double c2 = (kSsimK2 * data_range) * (kSsimK2 * data_range);

    double band_sum = 0.0;
    for (int b = 0; b < pred.bands; ++b) {
        double map_sum = 0.0;
        size_t positions = 0;
        for (int y = 0; y + kSsimWindow <= pred.height; ++y) {
            for (int x = 0; x + kSsimWindow <= pred.width; ++x) {
                double mx = 0.0, my = 0.0;
                for (int wy = 0; wy < kSsimWindow; ++wy) {
                    for (int wx = 0; wx < kSsimWindow; ++wx) {
                        const double w = window[static_cast<size_t>(wy) * kSsimWindow + wx];
                        mx += w * pred.at(b, y + wy, x + wx);
                        my += w * target.at(b, y + wy, x + wx);
                    }
                }
                double vx = 0.0, vy = 0.0, cov = 0.0;
                for (int wy = 0; wy < kSsimWindow; ++wy) {
                    for (int wx = 0; wx < kSsimWindow; ++wx) {
                        const double w = window[static_cast<size_t>(wy) * kSsimWindow + wx];
                        const double dx = pred.at(b, y + wy, x + wx) - mx;
                        const double dy = target.at(b, y + wy, x + wx) - my;
                        vx += w * dx * dx;
                        vy += w * dy * dy;
                        cov += w * dx * dy;
                    }
                }
                map_sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                           ((mx * mx + my * my + c1) * (vx + vy + c2));
                ++positions;
            }
        }
        band_sum += map_sum / static_cast<double>(positions);
    }
    return band_sum / pred.bands;
}

double sam_deg(const HsiCube& pred, const HsiCube& target) {
    check_shapes(pred, target);
    const size_t plane = pred.plane_size();
    double sum = 0.0;
    for (size_t p = 0; p < plane; ++p) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (int b = 0; b < pred.bands; ++b) {
            const double a = pred.data[static_cast<size_t>(b) * plane + p];
            const double t = target.data[static_cast<size_t>(b) * plane + p];
            dot += a * t;
            na += a * a;
            nb += t * t;
        }
        if (na == 0.0 || nb == 0.0) {
            continue;  // zero-vector pairs contribute 0
        }
        const double c = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
        sum += std::acos(c);
    }
    return sum / static_cast<double>(plane) * kDegPerRad;
}

double cc(const HsiCube& pred, const HsiCube& target, int* skipped_bands) {
    check_shapes(pred, target);
    const size_t plane = pred.plane_size();
    double sum = 0.0;
    int valid = 0;
    int skipped = 0;
    for (int b = 0; b < pred.bands; ++b) {
        const double* p = pred.data.data() + static_cast<size_t>(b) * plane;
        const double* t = target.data.data() + static_cast<size_t>(b) * plane;
        double mp = 0.0, mt = 0.0;
        for (size_t i = 0; i < plane; ++i) {
            mp += p[i];
            mt += t[i];
        }
        mp /= static_cast<double>(plane);
        mt /= static_cast<double>(plane);
        double vp = 0.0, vt = 0.0, cov = 0.0;
        for (size_t i = 0; i < plane; ++i) {
            const double dp = p[i] - mp;
            const double dt = t[i] - mt;
            vp += dp * dp;
            vt += dt * dt;
            cov += dp * dt;
        }
        if (vp == 0.0 || vt == 0.0) {
            ++skipped;
            continue;
        }
        sum += cov / std::sqrt(vp * vt);
        ++valid;
    }
    if (skipped_bands != nullptr) {
        *skipped_bands = skipped;
    }
    if (valid == 0) {
        throw ValidationError("cc: all bands are degenerate (zero variance)");
    }
    return sum / valid;
}

double rmse(const HsiCube& pred, const HsiCube& target) {
    check_shapes(pred, target);
    double sum = 0.0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(pred.data.size()));
}

double ergas(const HsiCube& pred, const HsiCube& target, double scale_ratio,
             int* skipped_bands) {
    check_shapes(pred, target);
    if (!(scale_ratio > 0.0)) {
        throw ValidationError("ergas scale ratio must be positive");
    }
    const size_t plane = pred.plane_size();
    double sum = 0.0;
    int valid = 0;
    int skipped = 0;
    for (int b = 0; b < pred.bands; ++b) {
        const double* t = target.data.data() + static_cast<size_t>(b) * plane;
        double mean = 0.0;
        for (size_t i = 0; i < plane; ++i) {
            mean += t[i];
        }
        mean /= static_cast<double>(plane);
        if (mean == 0.0) {
            ++skipped;
            continue;
        }
        const double band_rmse = std::sqrt(band_mse(pred, target, b));
        const double ratio = band_rmse / mean;
        sum += ratio * ratio;
        ++valid;
    }
    if (skipped_bands != nullptr) {
        *skipped_bands = skipped;
    }
    if (valid == 0) {
        throw ValidationError("ergas: all band means are zero");
    }
    return 100.0 / scale_ratio * std::sqrt(sum / valid);
}

double local_variation(const HsiCube& cube) {
    cube.validate();
    if (cube.height < 3 || cube.width < 3) {
        throw ValidationError("local variation needs height and width >= 3");
    }
    double band_sum = 0.0;
    for (int b = 0; b < cube.bands; ++b) {
        double window_sum = 0.0;
        size_t windows = 0;
        for (int y = 1; y + 1 < cube.height; ++y) {
            for (int x = 1; x + 1 < cube.width; ++x) {
                double s = 0.0, s2 = 0.0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const double v = cube.at(b, y + dy, x + dx);
                        s += v;
                        s2 += v * v;
                    }
                }
                const double mean = s / 9.0;
                window_sum += s2 / 9.0 - mean * mean;
                ++windows;
            }
        }
        band_sum += window_sum / static_cast<double>(windows);
    }
    return band_sum / cube.bands;
}

MetricReport report(const HsiCube& pred, const HsiCube& target,
                    const MetricOptions& options) {
    check_shapes(pred, target);
    MetricReport rep;
    rep.psnr = psnr(pred, target, options.data_range);
    rep.ssim = ssim(pred, target, options.data_range);
    rep.sam_deg = sam_deg(pred, target);
    int cc_skipped = 0;
    rep.cc = cc(pred, target, &cc_skipped);
    rep.rmse = rmse(pred, target);
    int ergas_skipped = 0;
    rep.ergas = ergas(pred, target, options.ergas_scale_ratio, &ergas_skipped);
    rep.lv = local_variation(target);

    // Union of bands skipped by cc (zero variance) and ergas (zero mean).
    std::set<int> skipped;
    const size_t plane = pred.plane_size();
    for (int b = 0; b < pred.bands; ++b) {
        const double* p = pred.data.data() + static_cast<size_t>(b) * plane;
        const double* t = target.data.data() + static_cast<size_t>(b) * plane;
        double mp = 0.0, mt = 0.0;
        for (size_t i = 0; i < plane; ++i) {
            mp += p[i];
            mt += t[i];
        }
        mp /= static_cast<double>(plane);
        mt /= static_cast<double>(plane);
        if (mt == 0.0) {
            skipped.insert(b);
            continue;
        }
        double vp = 0.0, vt = 0.0;
        for (size_t i = 0; i < plane; ++i) {
            vp += (p[i] - mp) * (p[i] - mp);
            vt += (t[i] - mt) * (t[i] - mt);
        }
        if (vp == 0.0 || vt == 0.0) {
            skipped.insert(b);
        }
    }
    rep.skipped_bands = static_cast<int>(skipped.size());
    return rep;
}

} // namespace gewdiff
