#include "gewdiff/sampler.hpp"

#include <cmath>

namespace gewdiff {

namespace {

void check_channels(const std::vector<double>& per_channel, const LatentCube& z,
                    const char* what) {
    if (per_channel.size() != static_cast<size_t>(z.channels)) {
        throw ValidationError(std::string(what) + " parameter count does not match latent channels");
    }
}

void check_shape(const LatentCube& a, const LatentCube& b, const char* what) {
    if (a.height != b.height || a.width != b.width || a.channels != b.channels) {
        throw ValidationError(std::string("denoiser violated the shape contract in ") + what);
    }
}

} // namespace

LatentCube GaussianDenoiser::operator()(const LatentCube& z_t, const ConditionSet*,
                                        double sigma) const {
    check_channels(mu, z_t, "gaussian denoiser mu");
    check_channels(s2, z_t, "gaussian denoiser s2");
    LatentCube out(z_t.height, z_t.width, z_t.channels);
    const size_t plane = z_t.plane_size();
    const double s = sigma * sigma;
    for (int c = 0; c < z_t.channels; ++c) {
        const double v = s2[c];
        const double m = mu[c];
        const double* in = z_t.data.data() + static_cast<size_t>(c) * plane;
        double* dst = out.data.data() + static_cast<size_t>(c) * plane;
        for (size_t p = 0; p < plane; ++p) {
            dst[p] = (v * in[p] + s * m) / (v + s);
        }
    }
    return out;
}

DenoiserFn make_gaussian_denoiser(std::vector<double> mu, std::vector<double> s2) {
    for (double v : s2) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError("gaussian denoiser variances must be finite and positive");
        }
    }
    ensure_finite(mu, "gaussian denoiser means");
    return GaussianDenoiser{std::move(mu), std::move(s2)};
}

DenoiserFn make_zero_denoiser() {
    return [](const LatentCube& z_t, const ConditionSet*, double) {
        return LatentCube(z_t.height, z_t.width, z_t.channels, 0.0);
    };
}

LatentCube LinearDenoiser::operator()(const LatentCube& z_t, const ConditionSet*,
                                      double) const {
    check_channels(gain, z_t, "linear denoiser gain");
    check_channels(offset, z_t, "linear denoiser offset");
    LatentCube out(z_t.height, z_t.width, z_t.channels);
    const size_t plane = z_t.plane_size();
    for (int c = 0; c < z_t.channels; ++c) {
        const double* in = z_t.data.data() + static_cast<size_t>(c) * plane;
        double* dst = out.data.data() + static_cast<size_t>(c) * plane;
        for (size_t p = 0; p < plane; ++p) {
            dst[p] = gain[c] * in[p] + offset[c];
        }
    }
    return out;
}

DenoiserFn make_linear_denoiser(std::vector<double> gain, std::vector<double> offset) {
    if (gain.size() != offset.size()) {
        throw ValidationError("linear denoiser gain/offset lengths differ");
    }
    ensure_finite(gain, "linear denoiser gains");
    ensure_finite(offset, "linear denoiser offsets");
    return LinearDenoiser{std::move(gain), std::move(offset)};
}

LatentCube init_state(const NoiseSchedule& schedule, int height, int width, int channels,
                      Rng& rng) {
    schedule.validate();
    if (height < 1 || width < 1 || channels < 1) {
        throw ValidationError("init_state needs a positive shape");
    }
    LatentCube state = standard_normal_field(rng, height, width, channels);
    for (double& v : state.data) {
        v *= schedule.sigma_max;
    }
    return state;
}

LatentCube solver_step(const LatentCube& z_n, const LatentCube& f_n,
                       const LatentCube* f_prev, double sigma_n, double sigma_next,
                       std::optional<double> sigma_prev) {
    if (!(sigma_next > 0.0) || !(sigma_next < sigma_n)) {
        throw ValidationError("solver_step needs 0 < sigma_next < sigma_n");
    }
    check_shape(f_n, z_n, "solver_step");

    double gamma = 0.0;
    if (f_prev != nullptr) {
        if (!sigma_prev.has_value()) {
            throw ValidationError("previous prediction supplied without sigma_prev");
        }
        check_shape(*f_prev, z_n, "solver_step history");
        const double t_n = t_of_sigma(sigma_n);
        const double t_next = t_of_sigma(sigma_next);
        const double t_prev = t_of_sigma(*sigma_prev);
        gamma = -0.5 * (t_next - t_n) / (t_n - t_prev);
    }

    const double ratio = sigma_next / sigma_n;
    LatentCube out(z_n.height, z_n.width, z_n.channels);
    for (size_t i = 0; i < out.data.size(); ++i) {
        const double extrapolated =
            (f_prev != nullptr) ? (1.0 - gamma) * f_n.data[i] + gamma * f_prev->data[i]
                                : f_n.data[i];
        out.data[i] = ratio * z_n.data[i] + (1.0 - ratio) * extrapolated;
    }
    return out;
}

LatentCube sample_from(LatentCube state, const DenoiserFn& denoiser,
                       const ConditionSet* conditions, const NoiseSchedule& schedule,
                       bool final_denoise) {
    schedule.validate();
    std::optional<LatentCube> prev_prediction;
    std::optional<double> prev_sigma;
    for (int n = 0; n + 1 < schedule.steps(); ++n) {
        const double sigma_n = schedule.sigmas[n];
        LatentCube prediction = denoiser(state, conditions, sigma_n);
        check_shape(prediction, state, "sample");
        state = solver_step(state, prediction,
                            prev_prediction ? &*prev_prediction : nullptr, sigma_n,
                            schedule.sigmas[n + 1], prev_sigma);
        prev_prediction = std::move(prediction);
        prev_sigma = sigma_n;
    }
    if (final_denoise) {
        LatentCube prediction = denoiser(state, conditions, schedule.sigma_min);
        check_shape(prediction, state, "final denoise");
        state = std::move(prediction);
    }
    ensure_finite(state.data, "sampler output");
    return state;
}

LatentCube sample(const DenoiserFn& denoiser, const ConditionSet* conditions,
                  const SamplerConfig& config, int height, int width, int channels) {
    Rng rng(config.seed);
    LatentCube state = init_state(config.schedule, height, width, channels, rng);
    return sample_from(std::move(state), denoiser, conditions, config.schedule,
                       config.final_denoise);
}

} // namespace gewdiff
