#pragma once

#include <string>
#include <vector>

#include "gewdiff/codec.hpp"
#include "gewdiff/conditioning.hpp"
#include "gewdiff/metrics.hpp"
#include "gewdiff/sampler.hpp"

namespace gewdiff {

// Every knob of the end-to-end pipeline with its default operating point.
// Loadable from a `key = value` text file; CLI flags override.
struct PipelineConfig {
    int rwa_levels = 1;
    int pca_k = 20;
    int sr_factor = 4;
    double sigma_max = 80.0;
    double sigma_min = 0.02;
    double rho = 0.7;
    int steps = 50;
    double eta = 0.5;
    int red_band = 37;   // ~660 nm for a 242-band EnMAP-like profile
    int nir_band = 68;   // ~865 nm
    uint64_t seed = 0;
    bool final_denoise = true;
    double edge_percentile = 90.0;
    int edge_dilate = 1;
    std::string denoiser = "gaussian";

    ConditioningConfig conditioning() const {
        return {red_band, nir_band, sr_factor, edge_percentile, edge_dilate};
    }
    NoiseSchedule schedule() const;
};

PipelineConfig load_config(const std::string& path);
void apply_config_line(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Encode with RWA + PCA, decode immediately (no diffusion), evaluate the
// reconstruction against the input.
MetricReport run_encode_decode_eval(const HsiCube& hr, const PipelineConfig& cfg);

struct SweepRow {
    int rwa_levels = 0;
    int pca_k = 0;
    MetricReport metrics;
};

// Roundtrip evaluation over a (levels x k) grid, one row per combination.
std::vector<SweepRow> run_sweep(const HsiCube& hr, const std::vector<int>& levels_list,
                                const std::vector<int>& k_list, const PipelineConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Full super-resolution pass: fit the codec on the LR cube, assemble
// conditions, run the sampler, then invert PCA and RWA (residuals zero) into
// a cube at sr_factor times the LR spatial size.
HsiCube run_super_resolution(const HsiCube& lr, const SegmentationMap* segs,
                             const PipelineConfig& cfg, const DenoiserFn& denoiser);

// Gaussian denoiser fitted to the per-channel statistics of a latent.
DenoiserFn gaussian_denoiser_from_latent(const LatentCube& latent);

// Builds the configured denoiser for CLI runs. "gaussian" fits channel
// statistics of the conditioning latent; "zero" ignores everything;
// "linear-file:<path>" loads per-channel gain/offset pairs (f64le).
DenoiserFn make_cli_denoiser(const std::string& spec, const LatentCube& lr_latent);

// Schedule inspection table: n, sigma_n, t_n, dt_n, gamma_n per row.
// dt is blank on the last row; gamma is blank where no history exists.
std::string run_schedule_report(const NoiseSchedule& schedule);

} // namespace gewdiff
