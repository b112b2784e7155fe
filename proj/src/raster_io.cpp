#include "gewdiff/raster_io.hpp"

#include <cstring>
#include <fstream>

#include <json.hpp>

namespace gewdiff {

namespace {

struct Header {
    int height = 0;
    int width = 0;
    int bands = 0;
    std::string dtype;
    double scale_factor = 1.0;
    std::string layout = "bsq";
};

std::string header_json(int height, int width, int bands, const std::string& dtype,
                        double scale_factor) {
    nlohmann::json j;
    j["height"] = height;
    j["width"] = width;
    j["bands"] = bands;
    j["dtype"] = dtype;
    j["scale_factor"] = scale_factor;
    j["layout"] = "bsq";
    return j.dump();
}

Header parse_header(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("cannot read header line from " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed header in " + path + ": " + e.what());
    }
    Header h;
    try {
        h.height = j.at("height").get<int>();
        h.width = j.at("width").get<int>();
        h.bands = j.at("bands").get<int>();
        h.dtype = j.at("dtype").get<std::string>();
        h.scale_factor = j.value("scale_factor", 1.0);
        h.layout = j.value("layout", "bsq");
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed header in " + path + ": " + e.what());
    }
    if (h.height <= 0 || h.width <= 0 || h.bands <= 0) {
        throw ValidationError("malformed header in " + path + ": non-positive dimensions");
    }
    if (h.layout != "bsq") {
        throw ValidationError("unsupported layout \"" + h.layout + "\" in " + path);
    }
    return h;
}

std::vector<uint32_t> read_payload_u32(std::istream& in, size_t count, const std::string& path) {
    std::vector<unsigned char> raw(count * 4);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<size_t>(in.gcount()) != raw.size()) {
        throw ValidationError("payload length mismatch in " + path + ": expected " +
                              std::to_string(count) + " values");
    }
    // Trailing bytes beyond the declared payload are also a mismatch.
    char extra;
    if (in.read(&extra, 1)) {
        throw ValidationError("payload length mismatch in " + path + ": trailing bytes");
    }
    std::vector<uint32_t> out(count);
    for (size_t i = 0; i < count; ++i) {
        out[i] = static_cast<uint32_t>(raw[4 * i]) |
                 (static_cast<uint32_t>(raw[4 * i + 1]) << 8) |
                 (static_cast<uint32_t>(raw[4 * i + 2]) << 16) |
                 (static_cast<uint32_t>(raw[4 * i + 3]) << 24);
    }
    return out;
}

void write_payload_u32(std::ostream& out, const std::vector<uint32_t>& values) {
    std::vector<unsigned char> raw(values.size() * 4);
    for (size_t i = 0; i < values.size(); ++i) {
        raw[4 * i] = static_cast<unsigned char>(values[i] & 0xff);
        raw[4 * i + 1] = static_cast<unsigned char>((values[i] >> 8) & 0xff);
        raw[4 * i + 2] = static_cast<unsigned char>((values[i] >> 16) & 0xff);
        raw[4 * i + 3] = static_cast<unsigned char>((values[i] >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

std::vector<double> read_payload_f32(std::istream& in, size_t count, double scale,
                                     const std::string& path) {
    const std::vector<uint32_t> bits = read_payload_u32(in, count, path);
    std::vector<double> out(count);
    for (size_t i = 0; i < count; ++i) {
        float f;
        std::memcpy(&f, &bits[i], 4);
        out[i] = static_cast<double>(f) / scale;
    }
    return out;
}

void write_payload_f32(std::ostream& out, const std::vector<double>& values) {
    std::vector<uint32_t> bits(values.size());
    for (size_t i = 0; i < values.size(); ++i) {
        const float f = static_cast<float>(values[i]);
        std::memcpy(&bits[i], &f, 4);
    }
    write_payload_u32(out, bits);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path + " for reading");
    }
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw IoError("write failure on " + path);
    }
}

} // namespace

HsiCube load_cube(const std::string& path) {
    auto in = open_input(path);
    const Header h = parse_header(in, path);
    if (h.dtype != "f32le") {
        throw ValidationError("expected dtype f32le in " + path + ", got " + h.dtype);
    }
    if (h.scale_factor <= 0.0) {
        throw ValidationError("malformed header in " + path + ": scale_factor must be positive");
    }
    HsiCube cube;
    cube.height = h.height;
    cube.width = h.width;
    cube.bands = h.bands;
    cube.data = read_payload_f32(in, cube.size(), h.scale_factor, path);
    cube.validate();
    return cube;
}

void save_cube(const HsiCube& cube, const std::string& path) {
    cube.validate();
    auto out = open_output(path);
    out << header_json(cube.height, cube.width, cube.bands, "f32le", 1.0) << '\n';
    write_payload_f32(out, cube.data);
    finish_output(out, path);
}

LatentCube load_latent(const std::string& path) {
    return to_latent(load_cube(path));
}

void save_latent(const LatentCube& latent, const std::string& path) {
    save_cube(to_cube(latent), path);
}

SegmentationMap load_segmentation(const std::string& path) {
    auto in = open_input(path);
    const Header h = parse_header(in, path);
    if (h.dtype != "u32le") {
        throw ValidationError("expected dtype u32le in " + path + ", got " + h.dtype);
    }
    if (h.bands != 1) {
        throw ValidationError("segmentation map in " + path + " must have bands = 1");
    }
    SegmentationMap segs;
    segs.height = h.height;
    segs.width = h.width;
    segs.labels = read_payload_u32(in, segs.size(), path);
    segs.validate();
    return segs;
}

void save_segmentation(const SegmentationMap& segs, const std::string& path) {
    segs.validate();
    auto out = open_output(path);
    out << header_json(segs.height, segs.width, 1, "u32le", 1.0) << '\n';
    write_payload_u32(out, segs.labels);
    finish_output(out, path);
}

ImagePlane load_plane(const std::string& path) {
    const HsiCube cube = load_cube(path);
    if (cube.bands != 1) {
        throw ValidationError("expected single-band raster in " + path);
    }
    ImagePlane plane;
    plane.height = cube.height;
    plane.width = cube.width;
    plane.values = cube.data;
    return plane;
}

void save_plane(const ImagePlane& plane, const std::string& path) {
    HsiCube cube;
    cube.height = plane.height;
    cube.width = plane.width;
    cube.bands = 1;
    cube.data = plane.values;
    save_cube(cube, path);
}

} // namespace gewdiff
