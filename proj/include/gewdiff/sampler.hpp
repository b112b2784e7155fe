#pragma once

#include <functional>
#include <optional>

#include "gewdiff/conditioning.hpp"
#include "gewdiff/schedule.hpp"
#include "gewdiff/types.hpp"

namespace gewdiff {

// Denoiser contract: given noisy features, optional conditions and the noise
// strength, return the data prediction (the clean-signal estimate). Must be
// deterministic and shape-preserving; conditions may be null for denoisers
// that do not use them.
using DenoiserFn =
    std::function<LatentCube(const LatentCube& z_t, const ConditionSet* cond, double sigma)>;

// Exact posterior mean for per-channel Gaussian data z0 ~ N(mu_c, s2_c) under
// z_t = z0 + sigma * eps:
//   D(z, sigma)_c = (s2_c * z_c + sigma^2 * mu_c) / (s2_c + sigma^2)
// The probability-flow ODE is then solvable in closed form, which makes this
// the reference oracle for the solver.
struct GaussianDenoiser {
    std::vector<double> mu;
    std::vector<double> s2;

    LatentCube operator()(const LatentCube& z_t, const ConditionSet* cond, double sigma) const;
};

DenoiserFn make_gaussian_denoiser(std::vector<double> mu, std::vector<double> s2);

// Data prediction identically zero; the solver then contracts the state by
// sigma_next/sigma_n each step.
DenoiserFn make_zero_denoiser();

// Sigma-independent per-channel affine map D(z)_c = gain_c * z_c + offset_c,
// the plug-in surface for externally trained affine denoisers.
struct LinearDenoiser {
    std::vector<double> gain;
    std::vector<double> offset;

    LatentCube operator()(const LatentCube& z_t, const ConditionSet* cond, double sigma) const;
};

DenoiserFn make_linear_denoiser(std::vector<double> gain, std::vector<double> offset);

struct SamplerConfig {
    NoiseSchedule schedule;
    uint64_t seed = 0;
    // Replace the terminal state with a last data prediction at sigma_min so
    // the output sits on the denoiser's data-manifold estimate.
    bool final_denoise = true;
};

// Initial state z_T = sigma_max * eps with eps a standard normal field.
LatentCube init_state(const NoiseSchedule& schedule, int height, int width, int channels,
                      Rng& rng);

// One multistep update in data-prediction form with t = -log sigma:
//   gamma = -1/2 * (t_next - t_n) / (t_n - t_prev)        (0 on the first step)
//   f~    = (1 - gamma) * f_n + gamma * f_prev
//   z_next = (sigma_next/sigma_n) * z_n + (1 - sigma_next/sigma_n) * f~
// Exact for a constant data prediction regardless of step size.
LatentCube solver_step(const LatentCube& z_n, const LatentCube& f_n,
                       const LatentCube* f_prev, double sigma_n, double sigma_next,
                       std::optional<double> sigma_prev);

// Full deterministic run: draw z_T, then one solver step per schedule interval
// reusing the previous data prediction (one denoiser evaluation per step; with
// the final denoise the total evaluation count equals the step count).
LatentCube sample(const DenoiserFn& denoiser, const ConditionSet* conditions,
                  const SamplerConfig& config, int height, int width, int channels);

// Same, starting from a caller-supplied state (exposed for verification).
LatentCube sample_from(LatentCube state, const DenoiserFn& denoiser,
                       const ConditionSet* conditions, const NoiseSchedule& schedule,
                       bool final_denoise);

} // namespace gewdiff
