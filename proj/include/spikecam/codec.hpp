#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikecam/reconstruct.hpp"

namespace spikecam {

// 16-bit encoded reconstruction record: stability duration in the high
// byte, quantized intensity in the low byte. Durations above 255 split
// into full-duration words with the remainder last.

inline int duration_of(uint16_t word) { return word >> 8; }
inline int intensity_of(uint16_t word) { return word & 0xff; }

// Intensity is rounded to the nearest integer, ties away from zero.
void encode_append(std::vector<uint16_t>& words, long duration, double intensity);
std::vector<uint16_t> encode(long duration, double intensity);
std::vector<uint16_t> encode_events(std::span<const SegmentEvent> events);

// Expands each word to `duration` repetitions of its intensity. A
// zero-duration word is a malformed stream.
std::vector<uint8_t> decode(std::span<const uint16_t> words);

}  // namespace spikecam
