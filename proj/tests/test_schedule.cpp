#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gewdiff/schedule.hpp"

#include "test_util.hpp"

using namespace gewdiff;

namespace {

// High-precision reference for the curved grid, evaluated in long double.
long double schedule_oracle(long double sigma_max, long double sigma_min, long double rho,
                            int steps, int n) {
    const long double inv_rho = 1.0L / rho;
    const long double hi = std::exp(std::log(sigma_max) * inv_rho);
    const long double lo = std::exp(std::log(sigma_min) * inv_rho);
    const long double frac = static_cast<long double>(n) / (steps - 1);
    const long double base = hi + frac * (lo - hi);
    return std::exp(std::log(base) * rho);
}

} // namespace

TEST_CASE("degenerate p_std makes sigma deterministic at exp(p_mean)") {
    TrainNoiseConfig cfg;
    cfg.p_std = 1e-300;  // validation requires > 0
    Rng rng(1);
    for (int i = 0; i < 10; ++i) {
        CHECK(sample_sigma(rng, cfg) == doctest::Approx(0.3011942).epsilon(1e-6));
    }
}

TEST_CASE("sigma draws follow the lognormal moments") {
    TrainNoiseConfig cfg;
    Rng rng(2024);
    const size_t n = 1000000;
    double mean = 0.0;
    std::vector<double> logs(n);
    for (size_t i = 0; i < n; ++i) {
        const double sigma = sample_sigma(rng, cfg);
        CHECK(sigma > 0.0);
        logs[i] = std::log(sigma);
        mean += logs[i];
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : logs) {
        var += (v - mean) * (v - mean);
    }
    const double stddev = std::sqrt(var / static_cast<double>(n - 1));
    CHECK(std::abs(mean - (-1.2)) < 0.005);
    CHECK(std::abs(stddev - 1.2) < 0.005);
}

TEST_CASE("sigma draws are deterministic under a seed") {
    TrainNoiseConfig cfg;
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_sigma(a, cfg) == sample_sigma(b, cfg));
    }
}

TEST_CASE("t_of_sigma pins the documented values") {
    CHECK(t_of_sigma(1.0) == 0.0);
    CHECK(t_of_sigma(std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t_of_sigma(80.0) == doctest::Approx(-4.3820266).epsilon(1e-7));
    CHECK_THROWS_AS(t_of_sigma(0.0), ValidationError);
    CHECK_THROWS_AS(t_of_sigma(-1.0), ValidationError);
}

TEST_CASE("schedule endpoints are exact and the interior decreases") {
    const NoiseSchedule s = build_schedule(80.0, 0.002, 0.7, 50);
    CHECK(s.sigmas.front() == 80.0);
    CHECK(s.sigmas.back() == 0.002);
    for (size_t i = 1; i < s.sigmas.size(); ++i) {
        CHECK(s.sigmas[i] < s.sigmas[i - 1]);
    }
}

TEST_CASE("rho = 1 collapses to linear interpolation") {
    const int n = 50;
    const NoiseSchedule s = build_schedule(80.0, 0.002, 1.0, n);
    for (int i = 0; i < n; ++i) {
        const double lin = 80.0 + i / static_cast<double>(n - 1) * (0.002 - 80.0);
        CHECK(std::abs(s.sigmas[i] - lin) < 1e-12 * 80.0);
    }
}

TEST_CASE("interior grid points match the long-double oracle") {
    const NoiseSchedule s = build_schedule(80.0, 0.002, 0.7, 50);
    for (int n : {1, 10, 25, 40, 48}) {
        const double expected =
            static_cast<double>(schedule_oracle(80.0L, 0.002L, 0.7L, 50, n));
        CHECK(s.sigmas[n] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("strict decrease holds across the rho range") {
    for (double rho : {0.1, 0.5, 0.7, 1.0, 3.0, 7.0, 10.0}) {
        const NoiseSchedule s = build_schedule(80.0, 0.02, rho, 64);
        for (size_t i = 1; i < s.sigmas.size(); ++i) {
            CHECK(s.sigmas[i] < s.sigmas[i - 1]);
        }
    }
}

TEST_CASE("deviation from linear grows with |rho - 1|") {
    auto max_deviation = [](double rho) {
        const int n = 33;
        const NoiseSchedule s = build_schedule(80.0, 0.02, rho, n);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double lin = 80.0 + i / static_cast<double>(n - 1) * (0.02 - 80.0);
            worst = std::max(worst, std::abs(s.sigmas[i] - lin));
        }
        return worst;
    };
    double prev = max_deviation(1.0);
    for (double rho : {0.9, 0.8, 0.7, 0.6, 0.5}) {
        const double dev = max_deviation(rho);
        CHECK(dev >= prev - 1e-9);
        prev = dev;
    }
    prev = max_deviation(1.0);
    for (double rho : {1.5, 2.0, 3.0, 5.0}) {
        const double dev = max_deviation(rho);
        CHECK(dev >= prev - 1e-9);
        prev = dev;
    }
}

TEST_CASE("schedule parameter violations are rejected") {
    CHECK_THROWS_AS(build_schedule(0.02, 80.0, 0.7, 50), ValidationError);
    CHECK_THROWS_AS(build_schedule(80.0, -1.0, 0.7, 50), ValidationError);
    CHECK_THROWS_AS(build_schedule(80.0, 0.02, 0.0, 50), ValidationError);
    CHECK_THROWS_AS(build_schedule(80.0, 0.02, 0.7, 1), ValidationError);
}

TEST_CASE("edge-free perturbation is the plain forward process") {
    const LatentCube z0 = testutil::random_latent(6, 6, 3, 8);
    const EdgeMap edge(6, 6, 0);
    TrainNoiseConfig cfg;
    Rng rng(12);
    Rng replay(12);
    const double sigma_t = 0.8;
    const LatentCube z_t = edge_aware_perturb(z0, sigma_t, edge, cfg, 80.0, rng);
    // Replay the same draws: with E = 0 the result is z0 + sigma * eps exactly.
    LatentCube expected = z0;
    const size_t plane = z0.plane_size();
    for (int c = 0; c < z0.channels; ++c) {
        for (size_t p = 0; p < plane; ++p) {
            expected.data[static_cast<size_t>(c) * plane + p] += sigma_t * replay.normal();
        }
    }
    CHECK(testutil::max_abs_diff(z_t.data, expected.data) == 0.0);
}

TEST_CASE("edge multipliers hit the printed endpoints") {
    TrainNoiseConfig cfg;  // eta = 0.5
    // sigma_norm = 0: multiplier on edges is 1 - eta = 0.5.
    // sigma_norm = 1: the protective factor vanishes, multiplier 1.
    const LatentCube z0(1, 1, 1, 0.0);
    const EdgeMap edge(1, 1, 1);

    const int trials = 20000;
    double acc_small = 0.0, acc_full = 0.0;
    Rng rng(77);
    for (int i = 0; i < trials; ++i) {
        // Tiny sigma against a huge sigma_max: sigma_norm ~ 0.
        const LatentCube a = edge_aware_perturb(z0, 1e-6, edge, cfg, 1e12, rng);
        acc_small += (a.data[0] / 1e-6) * (a.data[0] / 1e-6);
        // sigma at sigma_max: sigma_norm = 1.
        const LatentCube b = edge_aware_perturb(z0, 80.0, edge, cfg, 80.0, rng);
        acc_full += (b.data[0] / 80.0) * (b.data[0] / 80.0);
    }
    CHECK(std::sqrt(acc_small / trials) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::sqrt(acc_full / trials) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("perturbation validates shapes and sigma") {
    const LatentCube z0 = testutil::random_latent(4, 4, 2, 3);
    TrainNoiseConfig cfg;
    Rng rng(1);
    CHECK_THROWS_AS(edge_aware_perturb(z0, 0.5, EdgeMap(3, 4, 0), cfg, 80.0, rng),
                    ValidationError);
    CHECK_THROWS_AS(edge_aware_perturb(z0, 0.0, EdgeMap(4, 4, 0), cfg, 80.0, rng),
                    ValidationError);
}

TEST_CASE("constant images have no edges") {
    const LatentCube flat(8, 8, 3, 0.4);
    const EdgeMap edges = extract_edges(flat, 90.0, 1);
    for (uint8_t v : edges.values) {
        CHECK(v == 0);
    }
}

TEST_CASE("a vertical step lights up the step columns, dilated by one") {
    const int h = 8, w = 16;
    LatentCube img(h, w, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.at(0, y, x) = (x < w / 2) ? 0.0 : 1.0;
        }
    }
    const EdgeMap edges = extract_edges(img, 90.0, 1);
    // Sobel responds at columns 7 and 8; dilation by 1 adds 6 and 9.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool expected = (x >= 6 && x <= 9);
            CHECK(edges.at(y, x) == (expected ? 1 : 0));
        }
    }
}

TEST_CASE("edge extraction is deterministic") {
    const LatentCube img = testutil::random_latent(12, 12, 4, 19);
    const EdgeMap a = extract_edges(img, 90.0, 1);
    const EdgeMap b = extract_edges(img, 90.0, 1);
    CHECK(a.values == b.values);
    CHECK_THROWS_AS(extract_edges(LatentCube(2, 8, 1, 0.0), 90.0, 1), ValidationError);
}
