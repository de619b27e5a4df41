#pragma once

#include <optional>
#include <vector>

#include "spikecam/core.hpp"

namespace spikecam {

enum class Method { fsr, ssr, tfi, tfp };

struct ReconMethod {
    Method kind = Method::fsr;
    int tfp_window = 32;  // only for Method::tfp, >= 1

    static ReconMethod parse(const std::string& name, int window = 32);
    std::string name() const;
};

// One closed stable span: total frame count and its reconstructed
// intensity. Matches the 16-bit record payload before quantization.
struct SegmentEvent {
    long duration = 0;
    double intensity = 0.0;

    bool operator==(const SegmentEvent&) const = default;
};

// Breaks the stream's interval sequence S1 at zero-order violations and
// tiles the whole frame range with segments: a degenerate lead before the
// first spike, one segment per maximal stable run (span = first to last
// spike of the run), and a degenerate tail from the last spike on.
// Degenerate segments carry the previous segment's intensity (0 if none).
std::vector<Segment> segment_fsr(const SpikeLikeStream& stream);

// FSR first, then both second-level interval streams of each run are
// scanned with the same rule; a second-level violation breaks the run
// before the first-level interval closing the violating gap. Every SSR
// segment is a sub-span of exactly one FSR segment.
std::vector<Segment> segment_ssr(const SpikeLikeStream& stream);

// 255 / mean interval. Requires a non-degenerate segment.
double segment_intensity(const Segment& segment);

// Per-pixel streaming form of FSR. Feeding a whole stream bit by bit and
// flushing yields the same (duration, intensity) sequence as the batch
// segmentation, regardless of how the frames are blocked.
class PixelReconState {
public:
    // Advances one frame; returns a closed segment when one completes.
    std::optional<SegmentEvent> push_frame(bool bit);
    // Emits the still-open spans (at most two) at end of stream.
    std::vector<SegmentEvent> flush();

    long frames_seen() const { return frame_; }

private:
    bool accept_interval(int t);

    long frame_ = 0;
    long last_spike = -1;
    long run_start_spike = -1;
    long interval_sum = 0;
    long interval_count = 0;
    int pair_v1 = 0, pair_v2 = 0;
    bool have_v1 = false, have_v2 = false;
    double last_intensity = 0.0;
};

// Per-frame reconstruction of a whole volume. `workers` <= 0 means the
// library default (hardware parallelism). Output is identical for any
// worker count; reconstruct_serial is the plain-loop reference.
std::vector<IntensityImage> reconstruct(const SpikeVolume& volume, ReconMethod method,
                                        int workers = 0);
// Fills a caller-owned buffer (resized as needed) so repeated runs over
// the same geometry avoid reallocating the output planes.
void reconstruct(const SpikeVolume& volume, ReconMethod method, int workers,
                 std::vector<IntensityImage>& out);
std::vector<IntensityImage> reconstruct_serial(const SpikeVolume& volume, ReconMethod method);

// Batch FSR (duration, intensity) event sequence of one stream, the batch
// counterpart of PixelReconState.
std::vector<SegmentEvent> fsr_events(const SpikeLikeStream& stream);

// Per-frame values for one pixel stream under the given method.
std::vector<double> reconstruct_pixel(const SpikeLikeStream& stream, ReconMethod method);

}  // namespace spikecam
