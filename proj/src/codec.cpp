#include "spikecam/codec.hpp"

#include <cmath>
#include <stdexcept>

namespace spikecam {

void encode_append(std::vector<uint16_t>& words, long duration, double intensity) {
    if (duration < 1) throw std::invalid_argument("encode: duration must be >= 1");
    if (intensity < 0.0 || intensity > 255.0) {
        throw std::invalid_argument("encode: intensity outside [0, 255]");
    }
    uint16_t q = static_cast<uint16_t>(std::lround(intensity));
    while (duration > 255) {
        words.push_back(static_cast<uint16_t>(255 << 8 | q));
        duration -= 255;
    }
    words.push_back(static_cast<uint16_t>(duration << 8 | q));
}

std::vector<uint16_t> encode(long duration, double intensity) {
    std::vector<uint16_t> words;
    encode_append(words, duration, intensity);
    return words;
}

std::vector<uint16_t> encode_events(std::span<const SegmentEvent> events) {
    std::vector<uint16_t> words;
    for (const SegmentEvent& e : events) encode_append(words, e.duration, e.intensity);
    return words;
}

std::vector<uint8_t> decode(std::span<const uint16_t> words) {
    std::vector<uint8_t> frames;
    for (uint16_t w : words) {
        int d = duration_of(w);
        if (d == 0) throw std::runtime_error("decode: zero-duration record");
        frames.insert(frames.end(), static_cast<size_t>(d),
                      static_cast<uint8_t>(intensity_of(w)));
    }
    return frames;
}

}  // namespace spikecam
