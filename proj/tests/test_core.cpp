#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "gewdiff/raster_io.hpp"
#include "gewdiff/rng.hpp"
#include "gewdiff/types.hpp"

#include "test_util.hpp"

using namespace gewdiff;

TEST_CASE("cube validation catches bad shapes and payloads") {
    HsiCube cube(2, 2, 3, 0.5);
    CHECK_NOTHROW(cube.validate());

    cube.data.pop_back();
    CHECK_THROWS_AS(cube.validate(), ValidationError);

    HsiCube nanful(2, 2, 1, 0.0);
    nanful.data[1] = std::nan("");
    CHECK_THROWS_AS(nanful.validate(), NumericError);

    HsiCube empty;
    empty.height = 2;
    empty.width = 2;
    empty.bands = 0;
    CHECK_THROWS_AS(empty.validate(), ValidationError);
}

TEST_CASE("load applies the header scale factor") {
    const std::string path = testutil::temp_path("scaled.raster");
    {
        std::ofstream out(path, std::ios::binary);
        out << R"({"height":2,"width":2,"bands":3,"dtype":"f32le","scale_factor":10000.0,"layout":"bsq"})"
            << '\n';
        for (int i = 0; i < 12; ++i) {
            const float dn = 5000.0f;
            uint32_t bits;
            std::memcpy(&bits, &dn, 4);
            const unsigned char b[4] = {static_cast<unsigned char>(bits & 0xff),
                                        static_cast<unsigned char>((bits >> 8) & 0xff),
                                        static_cast<unsigned char>((bits >> 16) & 0xff),
                                        static_cast<unsigned char>((bits >> 24) & 0xff)};
            out.write(reinterpret_cast<const char*>(b), 4);
        }
    }
    const HsiCube cube = load_cube(path);
    CHECK(cube.bands == 3);
    for (double v : cube.data) {
        CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    }
    std::remove(path.c_str());
}

TEST_CASE("payload length mismatch is rejected") {
    const std::string path = testutil::temp_path("short.raster");
    {
        std::ofstream out(path, std::ios::binary);
        out << R"({"height":4,"width":4,"bands":242,"dtype":"f32le","scale_factor":1.0,"layout":"bsq"})"
            << '\n';
        // 4*4*241 values instead of 4*4*242
        const std::vector<char> payload(4 * 4 * 241 * 4, 0);
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    }
    CHECK_THROWS_WITH_AS(load_cube(path), doctest::Contains("payload length mismatch"),
                         ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("malformed header is rejected") {
    const std::string path = testutil::temp_path("badheader.raster");
    {
        std::ofstream out(path, std::ios::binary);
        out << "not json at all\n";
    }
    CHECK_THROWS_AS(load_cube(path), ValidationError);
    std::remove(path.c_str());
}

TEST_CASE("save/load roundtrip is bit-exact for f32-representable cubes") {
    const HsiCube cube = testutil::random_cube_f32(8, 8, 16, 42);
    const std::string path = testutil::temp_path("roundtrip.raster");
    save_cube(cube, path);
    const HsiCube back = load_cube(path);
    CHECK(back.height == cube.height);
    CHECK(back.width == cube.width);
    CHECK(back.bands == cube.bands);
    CHECK(std::memcmp(back.data.data(), cube.data.data(),
                      cube.data.size() * sizeof(double)) == 0);
    std::remove(path.c_str());
}

TEST_CASE("saving an empty-dimension cube is rejected before any write") {
    HsiCube bad;
    bad.height = 4;
    bad.width = 4;
    bad.bands = 0;
    CHECK_THROWS_AS(save_cube(bad, testutil::temp_path("never.raster")), ValidationError);
    std::ifstream check(testutil::temp_path("never.raster"));
    CHECK_FALSE(check.good());
}

TEST_CASE("save to an unwritable location raises an I/O error") {
    const HsiCube cube = testutil::random_cube_f32(2, 2, 2, 1);
    CHECK_THROWS_AS(save_cube(cube, "/proc/definitely/not/writable.raster"), IoError);
}

TEST_CASE("segmentation maps roundtrip through the u32 container") {
    SegmentationMap segs(3, 5);
    for (size_t i = 0; i < segs.labels.size(); ++i) {
        segs.labels[i] = static_cast<uint32_t>(i % 4);
    }
    const std::string path = testutil::temp_path("segs.raster");
    save_segmentation(segs, path);
    const SegmentationMap back = load_segmentation(path);
    CHECK(back.labels == segs.labels);
    std::remove(path.c_str());
}

TEST_CASE("rng streams are reproducible under a seed") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    Rng c(42), d(42);
    for (int i = 0; i < 1000; ++i) {
        CHECK(c.normal() == d.normal());
    }
}

TEST_CASE("rng integer stream matches frozen reference values") {
    // First draws for seed 0 and seed 42, frozen to pin the generator.
    Rng zero(0);
    CHECK(zero.next_u64() == 0x99ec5f36cb75f2b4ULL);
    Rng fortytwo(42);
    CHECK(fortytwo.next_u64() == 0x15780b2e0c2ec716ULL);
}

TEST_CASE("standard normal field has the right moments") {
    Rng rng(7);
    const size_t n = 1000000;
    const std::vector<double> draws = rng.normal_vector(n);
    double mean = 0.0;
    for (double v : draws) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : draws) {
        var += (v - mean) * (v - mean);
    }
    var /= static_cast<double>(n - 1);
    // Law-of-large-numbers bounds, ~3 standard errors.
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("empty shape yields an empty array") {
    Rng rng(3);
    CHECK(rng.normal_vector(0).empty());
}

TEST_CASE("derived substreams differ from the parent stream") {
    Rng master(11);
    Rng sub = master.derive(1);
    Rng sub2 = master.derive(2);
    CHECK(sub.next_u64() != sub2.next_u64());
}
