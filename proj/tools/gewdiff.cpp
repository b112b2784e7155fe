// gewdiff - hyperspectral latent codec, edge-aware EDM schedules and a
// deterministic second-order diffusion sampler, end to end on raster files.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gewdiff/losses.hpp"
#include "gewdiff/pipeline.hpp"
#include "gewdiff/raster_io.hpp"
#include "gewdiff/synthetic.hpp"

using namespace gewdiff;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    if (!out.flush()) {
        throw IoError("write failure on " + path);
    }
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::istringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        out.push_back(std::stoi(item));
    }
    if (out.empty()) {
        throw ValidationError("expected a comma-separated integer list, got: " + csv);
    }
    return out;
}

// Config file values seed the struct before parsing, so explicit CLI flags
// always win (CLI11 only writes bound variables for options that appear).
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            return argv[i + 1];
        }
        if (arg.rfind("--config=", 0) == 0) {
            return arg.substr(9);
        }
    }
    return "";
}

void add_pipeline_options(CLI::App* cmd, PipelineConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--rwa-levels", cfg.rwa_levels, "wavelet levels");
    cmd->add_option("--pca-k", cfg.pca_k, "retained PCA components");
    cmd->add_option("--factor", cfg.sr_factor, "spatial upscaling factor");
    cmd->add_option("--sigma-max", cfg.sigma_max, "maximum noise strength");
    cmd->add_option("--sigma-min", cfg.sigma_min, "minimum noise strength");
    cmd->add_option("--rho", cfg.rho, "schedule curvature");
    cmd->add_option("--steps", cfg.steps, "sampling steps");
    cmd->add_option("--eta", cfg.eta, "edge perturbation strength");
    cmd->add_option("--red-band", cfg.red_band, "red band index");
    cmd->add_option("--nir-band", cfg.nir_band, "near-infrared band index");
    cmd->add_option("--seed", cfg.seed, "rng seed");
    cmd->add_option("--edge-percentile", cfg.edge_percentile, "edge threshold percentile");
    cmd->add_option("--edge-dilate", cfg.edge_dilate, "edge dilation radius");
    cmd->add_option("--denoiser", cfg.denoiser,
                    "denoiser spec: gaussian | zero | linear-file:<path>");
    cmd->add_flag("--final-denoise,!--no-final-denoise", cfg.final_denoise,
                  "end with a data prediction at sigma_min");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GEWDiff hyperspectral codec, scheduler, sampler and metrics"};
    app.require_subcommand(1);

    PipelineConfig base_cfg;
    try {
        const std::string config_path = find_config_path(argc, argv);
        if (!config_path.empty()) {
            base_cfg = load_config(config_path);
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    }

    // ---- gen-synthetic ----
    auto* gen = app.add_subcommand("gen-synthetic", "write a seeded synthetic scene");
    SyntheticConfig syn_cfg;
    std::string gen_out, gen_seg_out;
    gen->add_option("--height", syn_cfg.height);
    gen->add_option("--width", syn_cfg.width);
    gen->add_option("--bands", syn_cfg.bands);
    gen->add_option("--segments", syn_cfg.num_segments);
    gen->add_option("--seed", syn_cfg.seed);
    gen->add_option("--texture", syn_cfg.texture_amplitude);
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--seg-out", gen_seg_out);

    // ---- encode / decode ----
    auto* encode = app.add_subcommand("encode", "RWA + PCA encode a cube into a container");
    PipelineConfig enc_cfg = base_cfg;
    std::string enc_config_path, enc_in, enc_out;
    bool enc_lossless = false;
    add_pipeline_options(encode, enc_cfg, enc_config_path);
    encode->add_option("--input", enc_in)->required();
    encode->add_option("--out", enc_out)->required();
    encode->add_flag("--lossless", enc_lossless, "keep detail residuals");

    auto* decode = app.add_subcommand("decode", "decode a codec container back to a cube");
    std::string dec_in, dec_out;
    bool dec_zero_residuals = false;
    decode->add_option("--input", dec_in)->required();
    decode->add_option("--out", dec_out)->required();
    decode->add_flag("--zero-residuals", dec_zero_residuals,
                     "ignore stored residuals while decoding");

    // ---- rwa-encode / rwa-decode ----
    auto* rwa_enc = app.add_subcommand("rwa-encode", "wavelet-regression encode only (no PCA)");
    std::string rwa_in, rwa_out;
    int rwa_levels = 1;
    bool rwa_lossless = false;
    rwa_enc->add_option("--input", rwa_in)->required();
    rwa_enc->add_option("--out", rwa_out)->required();
    rwa_enc->add_option("--levels", rwa_levels);
    rwa_enc->add_flag("--lossless", rwa_lossless);

    auto* rwa_dec = app.add_subcommand("rwa-decode", "invert a wavelet-only container");
    std::string rwa_dec_in, rwa_dec_out;
    bool rwa_dec_zero = false;
    rwa_dec->add_option("--input", rwa_dec_in)->required();
    rwa_dec->add_option("--out", rwa_dec_out)->required();
    rwa_dec->add_flag("--zero-residuals", rwa_dec_zero);

    // ---- roundtrip-eval / sweep ----
    auto* roundtrip = app.add_subcommand("roundtrip-eval", "encode, decode, evaluate");
    PipelineConfig rt_cfg = base_cfg;
    std::string rt_config_path, rt_in, rt_out = "-";
    add_pipeline_options(roundtrip, rt_cfg, rt_config_path);
    roundtrip->add_option("--input", rt_in)->required();
    roundtrip->add_option("--out", rt_out, "report CSV path or - for stdout");

    auto* sweep = app.add_subcommand("sweep", "roundtrip evaluation over a levels x k grid");
    PipelineConfig sweep_cfg = base_cfg;
    std::string sweep_config_path, sweep_in, sweep_out = "-";
    std::string sweep_levels = "1", sweep_ks = "20,10,6,4,3";
    add_pipeline_options(sweep, sweep_cfg, sweep_config_path);
    sweep->add_option("--input", sweep_in)->required();
    sweep->add_option("--levels-list", sweep_levels, "comma-separated levels");
    sweep->add_option("--k-list", sweep_ks, "comma-separated PCA sizes");
    sweep->add_option("--out", sweep_out);

    // ---- mask / edge / schedule ----
    auto* mask_cmd = app.add_subcommand("mask", "NDVI-driven segment mask");
    std::string mask_in, mask_segs, mask_out;
    int mask_red = base_cfg.red_band, mask_nir = base_cfg.nir_band;
    mask_cmd->add_option("--input", mask_in)->required();
    mask_cmd->add_option("--segments", mask_segs, "segmentation raster (fallback if absent)");
    mask_cmd->add_option("--red-band", mask_red);
    mask_cmd->add_option("--nir-band", mask_nir);
    mask_cmd->add_option("--out", mask_out)->required();

    auto* edge_cmd = app.add_subcommand("edge", "binary edge map raster");
    std::string edge_in, edge_out;
    double edge_percentile = 90.0;
    int edge_dilate = 1;
    edge_cmd->add_option("--input", edge_in)->required();
    edge_cmd->add_option("--percentile", edge_percentile);
    edge_cmd->add_option("--dilate", edge_dilate);
    edge_cmd->add_option("--out", edge_out)->required();

    auto* schedule_cmd = app.add_subcommand("schedule", "emit the sigma grid as CSV");
    double sch_rho = base_cfg.rho, sch_max = base_cfg.sigma_max, sch_min = base_cfg.sigma_min;
    int sch_steps = base_cfg.steps;
    bool sch_full = false;
    std::string sch_out = "-";
    schedule_cmd->add_option("--rho", sch_rho);
    schedule_cmd->add_option("--sigma-max", sch_max);
    schedule_cmd->add_option("--sigma-min", sch_min);
    schedule_cmd->add_option("--steps", sch_steps);
    schedule_cmd->add_flag("--full", sch_full, "include dt and gamma columns");
    schedule_cmd->add_option("--out", sch_out);

    // ---- sample / sr ----
    auto* sample_cmd = app.add_subcommand("sample", "run the sampler over stored conditions");
    PipelineConfig sample_cfg = base_cfg;
    std::string sample_config_path, sample_conditions, sample_out;
    sample_cmd->add_option("--conditions", sample_conditions,
                           "latent raster used as the conditioning input")
        ->required();
    sample_cmd->add_option("--out", sample_out)->required();
    add_pipeline_options(sample_cmd, sample_cfg, sample_config_path);

    auto* sr = app.add_subcommand("sr", "full super-resolution pipeline");
    PipelineConfig sr_cfg = base_cfg;
    std::string sr_config_path, sr_in, sr_segs, sr_out;
    add_pipeline_options(sr, sr_cfg, sr_config_path);
    sr->add_option("--input", sr_in)->required();
    sr->add_option("--segments", sr_segs);
    sr->add_option("--out", sr_out)->required();

    // ---- metrics / loss ----
    auto* metrics_cmd = app.add_subcommand("metrics", "full-reference metric report");
    std::string met_pred, met_target, met_out = "-";
    double met_range = 1.0, met_ratio = 4.0;
    metrics_cmd->add_option("--pred", met_pred)->required();
    metrics_cmd->add_option("--target", met_target)->required();
    metrics_cmd->add_option("--data-range", met_range);
    metrics_cmd->add_option("--scale-ratio", met_ratio);
    metrics_cmd->add_option("--out", met_out);

    auto* loss_cmd = app.add_subcommand("loss", "multi-level loss breakdown");
    std::string loss_pred, loss_target, loss_weights = "0.8,0.1,0.1", loss_out = "-";
    double loss_sigma = 0.5, loss_sigma_data = 0.5;
    loss_cmd->add_option("--pred", loss_pred)->required();
    loss_cmd->add_option("--target", loss_target)->required();
    loss_cmd->add_option("--sigma", loss_sigma);
    loss_cmd->add_option("--sigma-data", loss_sigma_data);
    loss_cmd->add_option("--weights", loss_weights, "lambda1,lambda2,lambda3");
    loss_cmd->add_option("--out", loss_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const SyntheticScene scene = gen_synthetic(syn_cfg);
            save_cube(scene.cube, gen_out);
            if (!gen_seg_out.empty()) {
                save_segmentation(scene.segments, gen_seg_out);
            }
        } else if (*encode) {
            const HsiCube cube = load_cube(enc_in);
            const EncodeResult result =
                encode_cube(cube, enc_cfg.rwa_levels, enc_cfg.pca_k, enc_lossless);
            CodecContainer container;
            container.rwa = result.rwa_encoding;
            container.pca = result.codec.pca;
            container.latent = result.latent;
            save_codec(container, enc_out);
        } else if (*decode) {
            const CodecContainer container = load_codec(dec_in);
            HsiCube cube;
            if (container.pca && container.latent) {
                RwaEncoding enc = container.rwa;
                enc.approx_top = pca_inverse(*container.latent, *container.pca);
                cube = rwa_decode(enc, dec_zero_residuals);
            } else {
                cube = rwa_decode(container.rwa, dec_zero_residuals);
            }
            save_cube(cube, dec_out);
        } else if (*rwa_enc) {
            const HsiCube cube = load_cube(rwa_in);
            CodecContainer container;
            container.rwa = rwa_encode(cube, rwa_levels, rwa_lossless);
            save_codec(container, rwa_out);
        } else if (*rwa_dec) {
            const CodecContainer container = load_codec(rwa_dec_in);
            save_cube(rwa_decode(container.rwa, rwa_dec_zero), rwa_dec_out);
        } else if (*roundtrip) {
            const HsiCube cube = load_cube(rt_in);
            const MetricReport rep = run_encode_decode_eval(cube, rt_cfg);
            write_text(rt_out, MetricReport::csv_header() + "\n" + rep.csv_row() + "\n");
        } else if (*sweep) {
            const HsiCube cube = load_cube(sweep_in);
            const auto rows = run_sweep(cube, parse_int_list(sweep_levels),
                                        parse_int_list(sweep_ks), sweep_cfg);
            write_text(sweep_out, sweep_csv(rows));
        } else if (*mask_cmd) {
            const HsiCube cube = load_cube(mask_in);
            const ImagePlane ndvi_norm = ndvi(cube, mask_red, mask_nir);
            SegmentationMap segs;
            if (!mask_segs.empty()) {
                segs = load_segmentation(mask_segs);
            } else {
                segs = fallback_segment(ndvi_norm);
            }
            const MaskMap mask = mask_from_segments(ndvi_norm, segs);
            ImagePlane plane(mask.height, mask.width);
            plane.values = mask.values;
            save_plane(plane, mask_out);
        } else if (*edge_cmd) {
            const HsiCube cube = load_cube(edge_in);
            const EdgeMap edges = extract_edges(cube, edge_percentile, edge_dilate);
            SegmentationMap raster(edges.height, edges.width);
            for (size_t i = 0; i < edges.values.size(); ++i) {
                raster.labels[i] = edges.values[i];
            }
            save_segmentation(raster, edge_out);
        } else if (*schedule_cmd) {
            const NoiseSchedule schedule = build_schedule(sch_max, sch_min, sch_rho, sch_steps);
            std::string csv;
            if (sch_full) {
                csv = run_schedule_report(schedule);
            } else {
                std::ostringstream os;
                os.precision(12);
                os << "n,sigma,t\n";
                for (int n = 0; n < schedule.steps(); ++n) {
                    os << n << ',' << schedule.sigmas[n] << ','
                       << t_of_sigma(schedule.sigmas[n]) << '\n';
                }
                csv = os.str();
            }
            write_text(sch_out, csv);
        } else if (*sample_cmd) {
            const LatentCube conditions_latent = load_latent(sample_conditions);
            ConditionSet cond;
            cond.lr_latent = conditions_latent;
            cond.mask = MaskMap(conditions_latent.height, conditions_latent.width, 0.0);
            cond.edge = EdgeMap(conditions_latent.height, conditions_latent.width, 0);
            const DenoiserFn denoiser =
                make_cli_denoiser(sample_cfg.denoiser, conditions_latent);
            SamplerConfig sampler_cfg;
            sampler_cfg.schedule = sample_cfg.schedule();
            sampler_cfg.seed = sample_cfg.seed;
            sampler_cfg.final_denoise = sample_cfg.final_denoise;
            const LatentCube out =
                sample(denoiser, &cond, sampler_cfg, conditions_latent.height,
                       conditions_latent.width, conditions_latent.channels);
            save_latent(out, sample_out);
        } else if (*sr) {
            const HsiCube lr = load_cube(sr_in);
            SegmentationMap segs;
            const SegmentationMap* segs_ptr = nullptr;
            if (!sr_segs.empty()) {
                segs = load_segmentation(sr_segs);
                segs_ptr = &segs;
            }
            const EncodeResult enc = encode_cube(lr, sr_cfg.rwa_levels, sr_cfg.pca_k);
            const DenoiserFn denoiser = make_cli_denoiser(sr_cfg.denoiser, enc.latent);
            const HsiCube out = run_super_resolution(lr, segs_ptr, sr_cfg, denoiser);
            save_cube(out, sr_out);
        } else if (*metrics_cmd) {
            const HsiCube pred = load_cube(met_pred);
            const HsiCube target = load_cube(met_target);
            const MetricReport rep = report(pred, target, {met_range, met_ratio});
            write_text(met_out, MetricReport::csv_header() + "\n" + rep.csv_row() +
                                    "\n# fid: not computed (needs a pretrained embedding)\n");
        } else if (*loss_cmd) {
            const LatentCube pred = load_latent(loss_pred);
            const LatentCube target = load_latent(loss_target);
            std::istringstream win(loss_weights);
            std::string item;
            LossWeights weights;
            weights.sigma_data = loss_sigma_data;
            std::getline(win, item, ',');
            weights.lambda1 = std::stod(item);
            std::getline(win, item, ',');
            weights.lambda2 = std::stod(item);
            std::getline(win, item, ',');
            weights.lambda3 = std::stod(item);

            const FeatureExtractorFn extractor = make_pyramid_extractor();
            const double pixel = pixel_loss(pred, target);
            const double perceptual = perceptual_loss(pred, target, extractor);
            const double gradient = gradient_loss(pred, target);
            const double lambda = loss_weight(loss_sigma, weights.sigma_data);
            const double total = total_loss(pred, target, extractor, weights, loss_sigma);
            std::ostringstream os;
            os.precision(12);
            os << "pixel,perceptual,gradient,lambda,total\n"
               << pixel << ',' << perceptual << ',' << gradient << ',' << lambda << ','
               << total << '\n';
            write_text(loss_out, os.str());
        }
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
