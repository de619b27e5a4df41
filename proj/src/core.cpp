#include "spikecam/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace spikecam {

SpikeVolume::SpikeVolume(int width, int height, int frames)
    : width_(width), height_(height), frames_(frames) {
    if (width < 1 || height < 1 || frames < 0) {
        throw std::invalid_argument("SpikeVolume: width/height must be >= 1, frames >= 0");
    }
    bits_.assign(static_cast<size_t>(width) * height * frames, 0);
}

void SpikeVolume::check_bounds(int x, int y, int n) const {
    if (x < 0 || x >= width_ || y < 0 || y >= height_ || n < 0 || n >= frames_) {
        throw std::out_of_range("SpikeVolume: index (" + std::to_string(x) + ", " +
                                std::to_string(y) + ", " + std::to_string(n) +
                                ") out of bounds");
    }
}

SpikeLikeStream::SpikeLikeStream(std::vector<int> vals, int e1, std::optional<int> e2)
    : values(std::move(vals)), firing_value(e1), resting_value(e2) {
    if (e2 && *e2 == e1) {
        throw std::invalid_argument("SpikeLikeStream: firing and resting values must differ");
    }
    for (int v : values) {
        if (v != e1 && (!e2 || v != *e2)) {
            throw std::invalid_argument("SpikeLikeStream: element " + std::to_string(v) +
                                        " is neither the firing nor the resting value");
        }
    }
}

SpikeLikeStream SpikeLikeStream::from_values(std::vector<int> vals) {
    std::set<int> distinct(vals.begin(), vals.end());
    if (distinct.size() > 2) {
        throw std::invalid_argument("SpikeLikeStream: more than two distinct values");
    }
    if (distinct.empty()) return SpikeLikeStream({}, 1, 0);
    int e1 = *distinct.rbegin();
    std::optional<int> e2;
    if (distinct.size() == 2) e2 = *distinct.begin();
    return SpikeLikeStream(std::move(vals), e1, e2);
}

std::vector<long> SpikeLikeStream::firing_positions() const {
    std::vector<long> pos;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] == firing_value) pos.push_back(static_cast<long>(i));
    }
    return pos;
}

IntervalStream::IntervalStream(std::vector<int> ivals) : intervals(std::move(ivals)) {
    for (int t : intervals) {
        if (t < 1) throw std::invalid_argument("IntervalStream: intervals must be >= 1");
    }
}

Segment::Segment(long start, long end, IntervalStream ivals, double inten)
    : start_frame(start), end_frame(end), intervals(std::move(ivals)), intensity(inten) {
    if (start >= end) throw std::invalid_argument("Segment: start_frame must precede end_frame");
    if (inten < 0.0 || inten > 255.0) {
        throw std::invalid_argument("Segment: intensity out of [0, 255]");
    }
}

IntensityImage::IntensityImage(int w, int h, double fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("IntensityImage: empty dimensions");
    values.assign(static_cast<size_t>(w) * h, fill);
}

SceneSpec SceneSpec::constant(int w, int h, double q) {
    return {w, h, [q](int, int, int) { return q; }};
}

SceneSpec SceneSpec::moving_bar(int w, int h, double q_bg, double q_bar,
                                int bar_width, int frames_per_pixel) {
    return {w, h, [=](int x, int, int n) {
                int offset = (n / frames_per_pixel) % w;
                int dx = (x - offset) % w;
                if (dx < 0) dx += w;
                return dx < bar_width ? q_bar : q_bg;
            }};
}

SceneSpec SceneSpec::rotating_wedge(int w, int h, double q_bg, double q_wedge,
                                    double angle, int period) {
    double cx = (w - 1) / 2.0;
    double cy = (h - 1) / 2.0;
    return {w, h, [=](int x, int y, int n) {
                double theta = std::atan2(y - cy, x - cx);
                double phase = 2.0 * M_PI * (n % period) / period;
                double d = std::fmod(theta - phase, 2.0 * M_PI);
                if (d < 0) d += 2.0 * M_PI;
                return d < angle ? q_wedge : q_bg;
            }};
}

SceneSpec SceneSpec::two_phase(int w, int h, double q_before, double q_after,
                               int switch_frame) {
    return {w, h, [=](int, int, int n) { return n < switch_frame ? q_before : q_after; }};
}

SpikeLikeStream pixel_stream(const SpikeVolume& volume, int x, int y) {
    if (x < 0 || x >= volume.width() || y < 0 || y >= volume.height()) {
        throw std::out_of_range("pixel_stream: coordinates out of bounds");
    }
    std::vector<int> vals(volume.frames());
    for (int n = 0; n < volume.frames(); ++n) {
        vals[n] = volume.at(x, y, n) ? 1 : 0;
    }
    return SpikeLikeStream(std::move(vals), 1, 0);
}

}  // namespace spikecam
