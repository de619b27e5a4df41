#include "spikecam/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <png.h>

namespace spikecam {

namespace {

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v & 0xff));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint16_t get_u16(const uint8_t* p) { return static_cast<uint16_t>(p[0] | p[1] << 8); }

uint32_t get_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
           static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

std::vector<uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (in.bad()) throw io_error("read failure on " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, const std::vector<uint8_t>& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw io_error("write failure on " + path.string());
}

size_t frame_bytes(int width, int height) {
    return (static_cast<size_t>(width) * height + 7) / 8;
}

void pack_frame(const SpikeVolume& volume, int n, std::vector<uint8_t>& out) {
    const int W = volume.width();
    const int H = volume.height();
    size_t base = out.size();
    out.resize(base + frame_bytes(W, H), 0);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            if (!volume.at(x, y, n)) continue;
            size_t p = static_cast<size_t>(y) * W + x;
            out[base + p / 8] |= static_cast<uint8_t>(1u << (p % 8));
        }
    }
}

void unpack_frame(const uint8_t* data, SpikeVolume& volume, int n, bool msb_first) {
    const int W = volume.width();
    const int H = volume.height();
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            size_t p = static_cast<size_t>(y) * W + x;
            int shift = msb_first ? 7 - static_cast<int>(p % 8) : static_cast<int>(p % 8);
            volume.set(x, y, n, (data[p / 8] >> shift) & 1);
        }
    }
}

uint8_t quantize(double v) {
    double q = std::round(std::clamp(v, 0.0, 255.0));
    return static_cast<uint8_t>(q);
}

std::vector<uint8_t> quantize_image(const IntensityImage& image) {
    std::vector<uint8_t> out(image.values.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = quantize(image.values[i]);
    return out;
}

void write_pgm(const IntensityImage& image, const std::filesystem::path& path) {
    std::vector<uint8_t> pixels = quantize_image(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot create " + path.string());
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()),
              static_cast<std::streamsize>(pixels.size()));
    if (!out) throw io_error("write failure on " + path.string());
}

void write_png(const IntensityImage& image, const std::filesystem::path& path) {
    std::vector<uint8_t> pixels = quantize_image(image);
    FILE* fp = std::fopen(path.string().c_str(), "wb");
    if (!fp) throw io_error("cannot create " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw io_error("png write failure on " + path.string());
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
                 static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
        png_write_row(png, pixels.data() + static_cast<size_t>(y) * image.width);
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

IntensityImage read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || maxval != 255 || w < 1 || h < 1) {
        throw io_error("not an 8-bit P5 PGM: " + path.string());
    }
    in.get();  // single whitespace after maxval
    std::vector<uint8_t> pixels(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    if (!in) throw io_error("truncated PGM payload: " + path.string());
    IntensityImage img(w, h);
    for (size_t i = 0; i < pixels.size(); ++i) img.values[i] = pixels[i];
    return img;
}

IntensityImage read_png(const std::filesystem::path& path) {
    FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) throw io_error("cannot open " + path.string());
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw io_error("png read failure on " + path.string());
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_rgb_to_gray(png, 1, -1.0, -1.0);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);
    int w = static_cast<int>(png_get_image_width(png, info));
    int h = static_cast<int>(png_get_image_height(png, info));
    std::vector<uint8_t> row(static_cast<size_t>(w));
    IntensityImage img(w, h);
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) img.at(x, y) = row[static_cast<size_t>(x)];
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

}  // namespace

void write_spk(const SpikeVolume& volume, uint32_t fps, const std::filesystem::path& path) {
    std::vector<uint8_t> data;
    data.reserve(16 + frame_bytes(volume.width(), volume.height()) * volume.frames());
    data.insert(data.end(), {'S', 'P', 'K', '1'});
    put_u16(data, static_cast<uint16_t>(volume.width()));
    put_u16(data, static_cast<uint16_t>(volume.height()));
    put_u32(data, fps);
    put_u32(data, static_cast<uint32_t>(volume.frames()));
    for (int n = 0; n < volume.frames(); ++n) pack_frame(volume, n, data);
    write_file(path, data);
}

std::pair<SpikeVolume, uint32_t> read_spk(const std::filesystem::path& path) {
    std::vector<uint8_t> data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), "SPK1", 4) != 0) {
        throw io_error("bad SPK1 magic in " + path.string());
    }
    int w = get_u16(data.data() + 4);
    int h = get_u16(data.data() + 6);
    uint32_t fps = get_u32(data.data() + 8);
    uint32_t frames = get_u32(data.data() + 12);
    if (w < 1 || h < 1) throw io_error("empty geometry in " + path.string());
    size_t expect = 16 + frame_bytes(w, h) * frames;
    if (data.size() != expect) {
        throw io_error("SPK1 length mismatch in " + path.string() + ": expected " +
                       std::to_string(expect) + " bytes, got " + std::to_string(data.size()));
    }
    SpikeVolume volume(w, h, static_cast<int>(frames));
    for (uint32_t n = 0; n < frames; ++n) {
        unpack_frame(data.data() + 16 + frame_bytes(w, h) * n, volume, static_cast<int>(n),
                     false);
    }
    return {std::move(volume), fps};
}

SpikeVolume read_raw(const std::filesystem::path& path, int width, int height, bool msb_first) {
    std::vector<uint8_t> data = read_file(path);
    size_t fb = frame_bytes(width, height);
    if (data.size() % fb != 0) {
        throw io_error("raw file " + path.string() + " (" + std::to_string(data.size()) +
                       " bytes) is not a multiple of the " + std::to_string(fb) +
                       "-byte frame size for " + std::to_string(width) + "x" +
                       std::to_string(height) + "; check --width/--height");
    }
    int frames = static_cast<int>(data.size() / fb);
    SpikeVolume volume(width, height, frames);
    for (int n = 0; n < frames; ++n) {
        unpack_frame(data.data() + fb * static_cast<size_t>(n), volume, n, msb_first);
    }
    return volume;
}

void write_image(const IntensityImage& image, const std::filesystem::path& path,
                 ImageFormat format) {
    if (format == ImageFormat::pgm) {
        write_pgm(image, path);
    } else {
        write_png(image, path);
    }
}

IntensityImage read_image(const std::filesystem::path& path) {
    std::vector<uint8_t> head = read_file(path);
    if (head.size() >= 2 && head[0] == 'P' && head[1] == '5') return read_pgm(path);
    return read_png(path);
}

void write_spkr(const RecordVolume& records, const std::filesystem::path& path) {
    if (records.words.size() != static_cast<size_t>(records.width) * records.height) {
        throw io_error("SPKR record table does not match geometry");
    }
    std::vector<uint8_t> data;
    data.insert(data.end(), {'S', 'P', 'K', 'R'});
    put_u16(data, static_cast<uint16_t>(records.width));
    put_u16(data, static_cast<uint16_t>(records.height));
    put_u32(data, records.fps);
    put_u32(data, records.frame_count);
    for (const auto& words : records.words) {
        put_u32(data, static_cast<uint32_t>(words.size()));
        for (uint16_t w : words) put_u16(data, w);
    }
    write_file(path, data);
}

RecordVolume read_spkr(const std::filesystem::path& path) {
    std::vector<uint8_t> data = read_file(path);
    if (data.size() < 16 || std::memcmp(data.data(), "SPKR", 4) != 0) {
        throw io_error("bad SPKR magic in " + path.string());
    }
    RecordVolume rv;
    rv.width = get_u16(data.data() + 4);
    rv.height = get_u16(data.data() + 6);
    rv.fps = get_u32(data.data() + 8);
    rv.frame_count = get_u32(data.data() + 12);
    if (rv.width < 1 || rv.height < 1) throw io_error("empty geometry in " + path.string());
    size_t pos = 16;
    size_t pixels = static_cast<size_t>(rv.width) * rv.height;
    rv.words.resize(pixels);
    for (size_t p = 0; p < pixels; ++p) {
        if (pos + 4 > data.size()) throw io_error("truncated SPKR record table: " + path.string());
        uint32_t count = get_u32(data.data() + pos);
        pos += 4;
        if (pos + 2ull * count > data.size()) {
            throw io_error("truncated SPKR records: " + path.string());
        }
        rv.words[p].resize(count);
        for (uint32_t i = 0; i < count; ++i) {
            rv.words[p][i] = get_u16(data.data() + pos);
            pos += 2;
        }
    }
    if (pos != data.size()) {
        throw io_error("trailing bytes after SPKR records in " + path.string());
    }
    return rv;
}

}  // namespace spikecam
