#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "spikecam/core.hpp"

namespace spikecam {

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr uint32_t kDefaultFps = 20000;
inline constexpr int kDefaultRawWidth = 400;
inline constexpr int kDefaultRawHeight = 250;

// SPK1 container: "SPK1" magic, u16 width, u16 height, u32 fps, u32 frame
// count (little-endian, 16 bytes), then one bit-packed plane per frame of
// ceil(W*H/8) bytes. Pixel p = y*W + x maps to byte p/8, bit p%8
// (LSB-first); trailing pad bits are zero.
void write_spk(const SpikeVolume& volume, uint32_t fps, const std::filesystem::path& path);
std::pair<SpikeVolume, uint32_t> read_spk(const std::filesystem::path& path);

// Headerless camera dump with caller-supplied geometry; frame count is
// inferred from the file size. `msb_first` flips the in-byte bit order for
// dumps packed the other way.
SpikeVolume read_raw(const std::filesystem::path& path, int width = kDefaultRawWidth,
                     int height = kDefaultRawHeight, bool msb_first = false);

enum class ImageFormat { pgm, png };

// 8-bit grayscale export; values rounded to nearest (ties away from zero).
void write_image(const IntensityImage& image, const std::filesystem::path& path,
                 ImageFormat format);
// Reads P5 PGM or 8-bit grayscale PNG back into [0, 255] values.
IntensityImage read_image(const std::filesystem::path& path);

// SPKR container for encoded reconstruction records: "SPKR" magic and the
// same geometry header, then per pixel (row-major) a u32 record count
// followed by that pixel's 16-bit words, all little-endian.
struct RecordVolume {
    int width = 0;
    int height = 0;
    uint32_t fps = kDefaultFps;
    uint32_t frame_count = 0;
    std::vector<std::vector<uint16_t>> words;  // per pixel, row-major

    std::vector<uint16_t>& pixel(int x, int y) {
        return words[static_cast<size_t>(y) * width + x];
    }
    const std::vector<uint16_t>& pixel(int x, int y) const {
        return words[static_cast<size_t>(y) * width + x];
    }
};

void write_spkr(const RecordVolume& records, const std::filesystem::path& path);
RecordVolume read_spkr(const std::filesystem::path& path);

}  // namespace spikecam
