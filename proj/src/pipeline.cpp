#include "gewdiff/pipeline.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gewdiff/schedule.hpp"

namespace gewdiff {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

uint64_t parse_u64(const std::string& value, const std::string& key) {
    try {
        return std::stoull(value);
    } catch (const std::exception&) {
        throw ValidationError("config value for " + key + " is not an integer: " + value);
    }
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw ValidationError("config value for " + key + " is not a number: " + value);
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "on") {
        return true;
    }
    if (value == "false" || value == "0" || value == "off") {
        return false;
    }
    throw ValidationError("config value for " + key + " is not a boolean: " + value);
}

} // namespace

NoiseSchedule PipelineConfig::schedule() const {
    return build_schedule(sigma_max, sigma_min, rho, steps);
}

void apply_config_line(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "rwa_levels") {
        cfg.rwa_levels = static_cast<int>(parse_u64(value, key));
    } else if (key == "pca_k") {
        cfg.pca_k = static_cast<int>(parse_u64(value, key));
    } else if (key == "sr_factor") {
        cfg.sr_factor = static_cast<int>(parse_u64(value, key));
    } else if (key == "sigma_max") {
        cfg.sigma_max = parse_double(value, key);
    } else if (key == "sigma_min") {
        cfg.sigma_min = parse_double(value, key);
    } else if (key == "rho") {
        cfg.rho = parse_double(value, key);
    } else if (key == "steps") {
        cfg.steps = static_cast<int>(parse_u64(value, key));
    } else if (key == "eta") {
        cfg.eta = parse_double(value, key);
    } else if (key == "red_band") {
        cfg.red_band = static_cast<int>(parse_u64(value, key));
    } else if (key == "nir_band") {
        cfg.nir_band = static_cast<int>(parse_u64(value, key));
    } else if (key == "seed") {
        cfg.seed = parse_u64(value, key);
    } else if (key == "final_denoise") {
        cfg.final_denoise = parse_bool(value, key);
    } else if (key == "edge_percentile") {
        cfg.edge_percentile = parse_double(value, key);
    } else if (key == "edge_dilate") {
        cfg.edge_dilate = static_cast<int>(parse_u64(value, key));
    } else if (key == "denoiser") {
        cfg.denoiser = value;
    } else {
        throw ValidationError("unknown config key: " + key);
    }
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path);
    }
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) +
                                  " is not `key = value`: " + stripped);
        }
        apply_config_line(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

MetricReport run_encode_decode_eval(const HsiCube& hr, const PipelineConfig& cfg) {
    const EncodeResult enc = encode_cube(hr, cfg.rwa_levels, cfg.pca_k);
    const HsiCube rec = enc.codec.decode(enc.latent);
    return report(rec, hr, {1.0, static_cast<double>(cfg.sr_factor)});
}

std::vector<SweepRow> run_sweep(const HsiCube& hr, const std::vector<int>& levels_list,
                                const std::vector<int>& k_list, const PipelineConfig& cfg) {
    if (levels_list.empty() || k_list.empty()) {
        throw ValidationError("sweep needs at least one levels value and one k value");
    }
    std::vector<SweepRow> rows;
    for (int levels : levels_list) {
        // The wavelet stage and its regressions do not depend on k; fit once.
        const RwaEncoding rwa = rwa_encode(hr, levels, /*keep_residuals=*/false);
        for (int k : k_list) {
            LatentCodec codec;
            codec.rwa = rwa.model;
            codec.pca = pca_fit(rwa.approx_top, k);
            const LatentCube latent = pca_project(rwa.approx_top, codec.pca);
            const HsiCube rec = codec.decode(latent);
            rows.push_back(
                {levels, k, report(rec, hr, {1.0, static_cast<double>(cfg.sr_factor)})});
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "rwa_levels,pca_k," << MetricReport::csv_header() << '\n';
    for (const auto& row : rows) {
        os << row.rwa_levels << ',' << row.pca_k << ',' << row.metrics.csv_row() << '\n';
    }
    return os.str();
}

DenoiserFn gaussian_denoiser_from_latent(const LatentCube& latent) {
    const size_t plane = latent.plane_size();
    if (plane < 2) {
        throw ValidationError("need at least 2 pixels to fit channel statistics");
    }
    std::vector<double> mu(latent.channels), s2(latent.channels);
    for (int c = 0; c < latent.channels; ++c) {
        const double* v = latent.data.data() + static_cast<size_t>(c) * plane;
        double mean = 0.0;
        for (size_t p = 0; p < plane; ++p) {
            mean += v[p];
        }
        mean /= static_cast<double>(plane);
        double var = 0.0;
        for (size_t p = 0; p < plane; ++p) {
            var += (v[p] - mean) * (v[p] - mean);
        }
        var /= static_cast<double>(plane - 1);
        mu[c] = mean;
        s2[c] = std::max(var, 1e-12);  // degenerate channels still need s2 > 0
    }
    return make_gaussian_denoiser(std::move(mu), std::move(s2));
}

DenoiserFn make_cli_denoiser(const std::string& spec, const LatentCube& lr_latent) {
    if (spec == "gaussian") {
        return gaussian_denoiser_from_latent(lr_latent);
    }
    if (spec == "zero") {
        return make_zero_denoiser();
    }
    const std::string prefix = "linear-file:";
    if (spec.rfind(prefix, 0) == 0) {
        const std::string path = spec.substr(prefix.size());
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw IoError("cannot open denoiser coefficient file " + path);
        }
        std::vector<double> raw;
        unsigned char b[8];
        while (in.read(reinterpret_cast<char*>(b), 8)) {
            uint64_t bits = 0;
            for (int i = 0; i < 8; ++i) {
                bits |= static_cast<uint64_t>(b[i]) << (8 * i);
            }
            double v;
            std::memcpy(&v, &bits, 8);
            raw.push_back(v);
        }
        if (raw.empty() || raw.size() % 2 != 0) {
            throw ValidationError("denoiser coefficient file must hold gain/offset pairs");
        }
        const size_t channels = raw.size() / 2;
        std::vector<double> gain(raw.begin(), raw.begin() + channels);
        std::vector<double> offset(raw.begin() + channels, raw.end());
        return make_linear_denoiser(std::move(gain), std::move(offset));
    }
    throw ValidationError("unknown denoiser spec: " + spec);
}

HsiCube run_super_resolution(const HsiCube& lr, const SegmentationMap* segs,
                             const PipelineConfig& cfg, const DenoiserFn& denoiser) {
    lr.validate();
    const EncodeResult enc = encode_cube(lr, cfg.rwa_levels, cfg.pca_k);
    const ConditionSet conditions = build_conditions(lr, segs, enc.codec, cfg.conditioning());

    SamplerConfig sampler_cfg;
    sampler_cfg.schedule = cfg.schedule();
    sampler_cfg.seed = cfg.seed;
    sampler_cfg.final_denoise = cfg.final_denoise;

    const LatentCube predicted =
        sample(denoiser, &conditions, sampler_cfg, lr.height * cfg.sr_factor,
               lr.width * cfg.sr_factor, cfg.pca_k);
    HsiCube out = enc.codec.decode(predicted);
    out.validate();
    return out;
}

std::string run_schedule_report(const NoiseSchedule& schedule) {
    schedule.validate();
    std::ostringstream os;
    os.precision(12);
    os << "n,sigma,t,dt,gamma\n";
    const int n_steps = schedule.steps();
    for (int n = 0; n < n_steps; ++n) {
        const double sigma = schedule.sigmas[n];
        const double t = t_of_sigma(sigma);
        os << n << ',' << sigma << ',' << t << ',';
        if (n + 1 < n_steps) {
            os << (t_of_sigma(schedule.sigmas[n + 1]) - t);
        }
        os << ',';
        if (n >= 1 && n + 1 < n_steps) {
            const double t_prev = t_of_sigma(schedule.sigmas[n - 1]);
            const double t_next = t_of_sigma(schedule.sigmas[n + 1]);
            os << (-0.5 * (t_next - t) / (t - t_prev));
        }
        os << '\n';
    }
    return os.str();
}

} // namespace gewdiff
