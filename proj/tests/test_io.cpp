#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "spikecam/io.hpp"

using namespace spikecam;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("spikecam_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::vector<uint8_t> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<uint8_t>& data) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

SpikeVolume random_volume(int w, int h, int t, uint64_t seed) {
    std::mt19937_64 rng(seed);
    SpikeVolume v(w, h, t);
    for (int n = 0; n < t; ++n) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) v.set(x, y, n, rng() & 1);
        }
    }
    return v;
}

}  // namespace

TEST_CASE("SPK1 golden bytes: header layout and LSB-first packing") {
    TempDir tmp;
    SpikeVolume v(2, 1, 1);
    v.set(0, 0, 0, true);
    fs::path f = tmp.path / "a.spk";
    write_spk(v, 20000, f);
    std::vector<uint8_t> expect{'S', 'P', 'K', '1',
                                0x02, 0x00,              // width
                                0x01, 0x00,              // height
                                0x20, 0x4e, 0x00, 0x00,  // fps 20000
                                0x01, 0x00, 0x00, 0x00,  // frames
                                0x01};                   // payload: bit 0 set
    CHECK(slurp(f) == expect);
}

TEST_CASE("pad bits of a partial byte are zero") {
    TempDir tmp;
    SpikeVolume v(9, 1, 1);
    for (int x = 0; x < 9; ++x) v.set(x, 0, 0, true);
    fs::path f = tmp.path / "pad.spk";
    write_spk(v, 20000, f);
    auto data = slurp(f);
    REQUIRE(data.size() == 18);
    CHECK(data[16] == 0xFF);
    CHECK(data[17] == 0x01);
}

TEST_CASE("SPK1 roundtrip of a camera-sized volume is bit-exact") {
    TempDir tmp;
    SpikeVolume v = random_volume(400, 250, 64, 61);
    fs::path f = tmp.path / "big.spk";
    write_spk(v, 20000, f);
    auto [back, fps] = read_spk(f);
    CHECK(fps == 20000);
    CHECK(back == v);
}

TEST_CASE("bad magic and truncation are reported") {
    TempDir tmp;
    fs::path f = tmp.path / "bad.spk";
    spit(f, {'N', 'O', 'P', 'E', 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK_THROWS_WITH_AS(read_spk(f), doctest::Contains("magic"), io_error);

    SpikeVolume v(4, 4, 2);
    fs::path g = tmp.path / "trunc.spk";
    write_spk(v, 20000, g);
    auto data = slurp(g);
    data.pop_back();
    spit(g, data);
    try {
        read_spk(g);
        FAIL("expected length error");
    } catch (const io_error& e) {
        std::string msg = e.what();
        CHECK(msg.find("expected 20 bytes") != std::string::npos);
        CHECK(msg.find("got 19") != std::string::npos);
    }
}

TEST_CASE("raw reader infers frames from the file size") {
    TempDir tmp;
    fs::path f = tmp.path / "dump.raw";
    spit(f, std::vector<uint8_t>(12500, 0));
    CHECK(read_raw(f, 400, 250).frames() == 1);
    spit(f, std::vector<uint8_t>(25000, 0));
    CHECK(read_raw(f, 400, 250).frames() == 2);
    spit(f, std::vector<uint8_t>(12501, 0));
    CHECK_THROWS_AS(read_raw(f, 400, 250), io_error);
}

TEST_CASE("raw reader accepts an SPK1 payload for matching geometry") {
    TempDir tmp;
    SpikeVolume v = random_volume(40, 25, 8, 67);
    fs::path f = tmp.path / "v.spk";
    write_spk(v, 20000, f);
    auto data = slurp(f);
    fs::path raw = tmp.path / "v.raw";
    spit(raw, {data.begin() + 16, data.end()});
    CHECK(read_raw(raw, 40, 25) == v);
}

TEST_CASE("msb-first toggle reverses the in-byte bit order") {
    TempDir tmp;
    fs::path f = tmp.path / "m.raw";
    spit(f, {0x01});  // one 8x1 frame
    SpikeVolume lsb = read_raw(f, 8, 1);
    CHECK(lsb.at(0, 0, 0));
    CHECK_FALSE(lsb.at(7, 0, 0));
    SpikeVolume msb = read_raw(f, 8, 1, true);
    CHECK(msb.at(7, 0, 0));
    CHECK_FALSE(msb.at(0, 0, 0));
}

TEST_CASE("image export quantizes half away from zero and preserves extremes") {
    TempDir tmp;
    IntensityImage img(4, 3, 127.5);
    img.at(0, 0) = 0.0;
    img.at(1, 0) = 255.0;
    for (ImageFormat fmt : {ImageFormat::pgm, ImageFormat::png}) {
        fs::path f = tmp.path / (fmt == ImageFormat::pgm ? "i.pgm" : "i.png");
        write_image(img, f, fmt);
        IntensityImage back = read_image(f);
        REQUIRE(back.width == 4);
        REQUIRE(back.height == 3);
        CHECK(back.at(0, 0) == 0.0);
        CHECK(back.at(1, 0) == 255.0);
        CHECK(back.at(2, 1) == 128.0);
    }
}

TEST_CASE("image roundtrip equals the quantized source") {
    TempDir tmp;
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> dist(0.0, 255.0);
    IntensityImage img(16, 11);
    for (double& v : img.values) v = dist(rng);
    for (ImageFormat fmt : {ImageFormat::pgm, ImageFormat::png}) {
        fs::path f = tmp.path / (fmt == ImageFormat::pgm ? "r.pgm" : "r.png");
        write_image(img, f, fmt);
        IntensityImage back = read_image(f);
        for (size_t i = 0; i < img.values.size(); ++i) {
            CHECK(back.values[i] == std::round(img.values[i]));
        }
    }
}

TEST_CASE("SPKR roundtrip preserves per-pixel record lists") {
    TempDir tmp;
    RecordVolume rv;
    rv.width = 3;
    rv.height = 2;
    rv.fps = 20000;
    rv.frame_count = 97;
    rv.words.resize(6);
    std::mt19937_64 rng(73);
    for (auto& words : rv.words) {
        int k = static_cast<int>(rng() % 5);
        for (int i = 0; i < k; ++i) {
            words.push_back(static_cast<uint16_t>((1 + rng() % 255) << 8 | (rng() % 256)));
        }
    }
    fs::path f = tmp.path / "r.spkr";
    write_spkr(rv, f);
    RecordVolume back = read_spkr(f);
    CHECK(back.width == rv.width);
    CHECK(back.height == rv.height);
    CHECK(back.fps == rv.fps);
    CHECK(back.frame_count == rv.frame_count);
    CHECK(back.words == rv.words);
}

TEST_CASE("truncated SPKR is rejected") {
    TempDir tmp;
    RecordVolume rv;
    rv.width = 2;
    rv.height = 1;
    rv.words = {{0x0102}, {0x0304}};
    fs::path f = tmp.path / "t.spkr";
    write_spkr(rv, f);
    auto data = slurp(f);
    data.pop_back();
    spit(f, data);
    CHECK_THROWS_AS(read_spkr(f), io_error);
}

TEST_CASE("missing file reports its path") {
    CHECK_THROWS_WITH_AS(read_spk("/nonexistent/file.spk"),
                         doctest::Contains("/nonexistent/file.spk"), io_error);
}
