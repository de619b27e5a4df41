#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spikecam {

// Binary W x H x T tensor of camera output. Frame-major storage, one byte
// per bit; immutable after construction except through set() during build.
class SpikeVolume {
public:
    SpikeVolume(int width, int height, int frames);

    int width() const { return width_; }
    int height() const { return height_; }
    int frames() const { return frames_; }

    bool at(int x, int y, int n) const {
        check_bounds(x, y, n);
        return bits_[index(x, y, n)] != 0;
    }
    void set(int x, int y, int n, bool v) {
        check_bounds(x, y, n);
        bits_[index(x, y, n)] = v ? 1 : 0;
    }

    // Raw frame-major bit array, element n*W*H + y*W + x.
    std::span<const uint8_t> raw() const { return bits_; }
    std::span<uint8_t> raw_mutable() { return bits_; }

    bool operator==(const SpikeVolume&) const = default;

private:
    size_t index(int x, int y, int n) const {
        return static_cast<size_t>(n) * width_ * height_ +
               static_cast<size_t>(y) * width_ + x;
    }
    void check_bounds(int x, int y, int n) const;

    int width_;
    int height_;
    int frames_;
    std::vector<uint8_t> bits_;
};

// Integer sequence with designated firing value e1 and optional resting
// value e2. Construction rejects sequences with three or more distinct
// values or with e1 == e2.
struct SpikeLikeStream {
    std::vector<int> values;
    int firing_value = 1;
    std::optional<int> resting_value;

    SpikeLikeStream() = default;
    SpikeLikeStream(std::vector<int> vals, int e1, std::optional<int> e2);

    // Infers e1/e2 from the content (e1 = larger of the two values seen).
    static SpikeLikeStream from_values(std::vector<int> vals);

    size_t size() const { return values.size(); }

    // 0-based positions of the firing value.
    std::vector<long> firing_positions() const;
};

// Sequence of positive inter-firing gaps T(m).
struct IntervalStream {
    std::vector<int> intervals;

    IntervalStream() = default;
    explicit IntervalStream(std::vector<int> ivals);

    size_t size() const { return intervals.size(); }
    bool empty() const { return intervals.empty(); }
};

// Maximal stable run of one pixel's stream. Half-open frame span.
// A segment with no intervals is degenerate (fewer than two spikes);
// its intensity is the caller's carry value.
struct Segment {
    long start_frame = 0;
    long end_frame = 0;   // exclusive
    IntervalStream intervals;
    double intensity = 0.0;

    Segment() = default;
    Segment(long start, long end, IntervalStream ivals, double inten);

    bool degenerate() const { return intervals.empty(); }
    long duration() const { return end_frame - start_frame; }
};

struct IntensityImage {
    int width = 0;
    int height = 0;
    std::vector<double> values;  // row-major, range [0, 255]

    IntensityImage() = default;
    IntensityImage(int w, int h, double fill = 0.0);

    double at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
};

// Ground-truth accumulation-rate field Q(x, y, n). Built-ins below; tests
// may supply any rate function. Q must stay within [0, threshold] -- the
// simulator validates per sample.
struct SceneSpec {
    int width = 0;
    int height = 0;
    std::function<double(int x, int y, int n)> rate;

    static SceneSpec constant(int w, int h, double q);
    // Vertical bar of rate q_bar over background q_bg, `bar_width` pixels
    // wide, advancing one pixel every `frames_per_pixel` frames (wraps).
    static SceneSpec moving_bar(int w, int h, double q_bg, double q_bar,
                                int bar_width, int frames_per_pixel);
    // Wedge of angular width `angle` radians rotating about the image
    // center, one full turn every `period` frames.
    static SceneSpec rotating_wedge(int w, int h, double q_bg, double q_wedge,
                                    double angle, int period);
    // Uniform field at q_before, switching to q_after at frame switch_frame.
    static SceneSpec two_phase(int w, int h, double q_before, double q_after,
                               int switch_frame);
};

// Extracts one pixel's time sequence as a binary spike stream (e1=1, e2=0).
SpikeLikeStream pixel_stream(const SpikeVolume& volume, int x, int y);

}  // namespace spikecam
