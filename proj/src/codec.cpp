#include "gewdiff/codec.hpp"

#include <cstring>
#include <fstream>

namespace gewdiff {

namespace {

constexpr uint32_t kMagic = 0x43445747;  // "GWDC"
constexpr uint32_t kVersion = 1;
constexpr uint32_t kFlagResiduals = 1u << 0;
constexpr uint32_t kFlagPca = 1u << 1;
constexpr uint32_t kFlagLatent = 1u << 2;

class Writer {
public:
    explicit Writer(std::ostream& out, const std::string& path) : out_(out), path_(path) {}

    void u32(uint32_t v) {
        unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
        out_.write(reinterpret_cast<const char*>(b), 4);
    }

    void i32(int v) { u32(static_cast<uint32_t>(v)); }

    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) {
            b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
        }
        out_.write(reinterpret_cast<const char*>(b), 8);
    }

    void f64_array(const std::vector<double>& values) {
        for (double v : values) {
            f64(v);
        }
    }

    void check() {
        if (!out_) {
            throw IoError("write failure on " + path_);
        }
    }

private:
    std::ostream& out_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(std::istream& in, const std::string& path) : in_(in), path_(path) {}

    uint32_t u32() {
        unsigned char b[4];
        read(b, 4);
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    }

    int i32() { return static_cast<int>(u32()); }

    double f64() {
        unsigned char b[8];
        read(b, 8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) {
            bits |= static_cast<uint64_t>(b[i]) << (8 * i);
        }
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::vector<double> f64_array(size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) {
            v = f64();
        }
        return out;
    }

private:
    void read(unsigned char* dst, size_t n) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in_.gcount()) != n) {
            throw ValidationError("truncated codec container: " + path_);
        }
    }

    std::istream& in_;
    std::string path_;
};

void write_latent(Writer& w, const LatentCube& cube) {
    w.i32(cube.height);
    w.i32(cube.width);
    w.i32(cube.channels);
    w.f64_array(cube.data);
}

LatentCube read_latent(Reader& r) {
    LatentCube cube;
    cube.height = r.i32();
    cube.width = r.i32();
    cube.channels = r.i32();
    if (cube.height <= 0 || cube.width <= 0 || cube.channels <= 0) {
        throw ValidationError("codec container holds a non-positive raster shape");
    }
    cube.data = r.f64_array(cube.size());
    return cube;
}

} // namespace

LatentCube LatentCodec::encode(const HsiCube& cube) const {
    rwa.validate();
    if (cube.bands != rwa.band_counts.front()) {
        throw ValidationError("cube band count does not match the fitted codec");
    }
    LatentCube running = to_latent(cube);
    for (int j = 0; j < rwa.levels; ++j) {
        running = haar_forward(running).approx;
    }
    return pca_project(running, pca);
}

HsiCube LatentCodec::decode(const LatentCube& latent) const {
    RwaEncoding enc;
    enc.approx_top = pca_inverse(latent, pca);
    enc.model = rwa;
    return rwa_decode(enc, /*zero_residuals=*/true);
}

EncodeResult encode_cube(const HsiCube& cube, int rwa_levels, int pca_k,
                         bool keep_residuals) {
    EncodeResult result;
    result.rwa_encoding = rwa_encode(cube, rwa_levels, keep_residuals);
    result.codec.rwa = result.rwa_encoding.model;
    result.codec.pca = pca_fit(result.rwa_encoding.approx_top, pca_k);
    result.latent = pca_project(result.rwa_encoding.approx_top, result.codec.pca);
    return result;
}

void save_codec(const CodecContainer& container, const std::string& path) {
    container.rwa.model.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    Writer w(out, path);
    w.u32(kMagic);
    w.u32(kVersion);
    uint32_t flags = 0;
    if (container.rwa.residuals) flags |= kFlagResiduals;
    if (container.pca) flags |= kFlagPca;
    if (container.latent) flags |= kFlagLatent;
    w.u32(flags);

    const RwaModel& model = container.rwa.model;
    w.i32(model.levels);
    for (int bands : model.band_counts) {
        w.i32(bands);
    }
    for (const auto& level : model.betas) {
        w.i32(static_cast<int>(level.size()));
        w.i32(level.empty() ? 0 : static_cast<int>(level.front().size()));
        for (const auto& row : level) {
            w.f64_array(row);
        }
    }
    write_latent(w, container.rwa.approx_top);

    if (container.rwa.residuals) {
        w.i32(static_cast<int>(container.rwa.residuals->size()));
        for (const auto& residual : *container.rwa.residuals) {
            write_latent(w, residual);
        }
    }
    if (container.pca) {
        container.pca->validate();
        w.i32(container.pca->channels());
        w.i32(container.pca->retained);
        w.f64_array(container.pca->mean);
        for (const auto& row : container.pca->loadings) {
            w.f64_array(row);
        }
        w.f64_array(container.pca->eigenvalues);
    }
    if (container.latent) {
        write_latent(w, *container.latent);
    }
    w.check();
}

CodecContainer load_codec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    Reader r(in, path);
    if (r.u32() != kMagic) {
        throw ValidationError("not a codec container: " + path);
    }
    if (r.u32() != kVersion) {
        throw ValidationError("unsupported codec container version in " + path);
    }
    const uint32_t flags = r.u32();

    CodecContainer container;
    RwaModel& model = container.rwa.model;
    model.levels = r.i32();
    if (model.levels < 1 || model.levels > 64) {
        throw ValidationError("codec container level count out of range");
    }
    model.band_counts.resize(model.levels);
    for (int& bands : model.band_counts) {
        bands = r.i32();
    }
    model.betas.resize(model.levels);
    for (auto& level : model.betas) {
        const int rows = r.i32();
        const int cols = r.i32();
        if (rows < 0 || cols < 0) {
            throw ValidationError("codec container beta shape out of range");
        }
        level.resize(rows);
        for (auto& row : level) {
            row = r.f64_array(cols);
        }
    }
    container.rwa.approx_top = read_latent(r);
    model.validate();

    if (flags & kFlagResiduals) {
        const int count = r.i32();
        if (count != model.levels) {
            throw ValidationError("codec container residual count mismatch");
        }
        container.rwa.residuals.emplace();
        for (int i = 0; i < count; ++i) {
            container.rwa.residuals->push_back(read_latent(r));
        }
    }
    if (flags & kFlagPca) {
        PcaModel pca;
        const int channels = r.i32();
        pca.retained = r.i32();
        if (channels < 1 || pca.retained < 1 || pca.retained > channels) {
            throw ValidationError("codec container pca shape out of range");
        }
        pca.mean = r.f64_array(channels);
        pca.loadings.resize(pca.retained);
        for (auto& row : pca.loadings) {
            row = r.f64_array(channels);
        }
        pca.eigenvalues = r.f64_array(pca.retained);
        pca.validate();
        container.pca = std::move(pca);
    }
    if (flags & kFlagLatent) {
        container.latent = read_latent(r);
    }
    return container;
}

} // namespace gewdiff
