#pragma once

#include <cstdint>
#include <span>

#include "spikecam/core.hpp"

namespace spikecam {

// Independent bit flips after readout plus multiplicative jitter on Q
// before accumulation. Per-pixel sub-streams are derived from
// (seed, x, y), so results do not depend on scheduling.
struct NoiseSpec {
    double flip_probability = 0.0;  // in [0, 0.5)
    double rate_jitter = 0.0;       // relative std-dev applied to Q per step
    uint64_t seed = 0;

    void validate() const;
};

struct SimulateOptions {
    double threshold = 1.0;
    // Decorrelates pixel phases when true; residual drawn uniformly from
    // [0, threshold) per pixel from (seed, x, y).
    bool random_initial_residual = false;
    uint64_t seed = 0;
    const NoiseSpec* noise = nullptr;
};

// Discrete accumulate-compare-reset recurrence: status accumulates Q each
// step, a bit fires when status reaches the threshold, and the threshold
// is subtracted (residual carried forward). Requires 0 <= Q <= threshold
// per step and 0 <= initial_residual < threshold.
SpikeLikeStream simulate_pixel(std::span<const double> rates, double threshold = 1.0,
                               double initial_residual = 0.0);

SpikeVolume simulate_scene(const SceneSpec& scene, int frames,
                           const SimulateOptions& opts = {});

// Reference image for frame n: 255 * Q(x, y, n) / threshold, clamped.
IntensityImage ideal_intensity(const SceneSpec& scene, int frame, double threshold = 1.0);

// Deterministic per-pixel RNG seed derived from (seed, x, y).
uint64_t pixel_seed(uint64_t seed, int x, int y);

}  // namespace spikecam
