#include "spikecam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spikecam {

namespace {

// Fire-comparison slack: rates arriving as decimal literals (0.3, ...) sit a
// few ulps below their real values, which would otherwise drop the spike at
// an exact multiple of the period.
constexpr double kFireTolerance = 1e-9;

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

void NoiseSpec::validate() const {
    if (flip_probability < 0.0 || flip_probability >= 0.5) {
        throw std::invalid_argument("NoiseSpec: flip_probability must be in [0, 0.5)");
    }
    if (rate_jitter < 0.0) {
        throw std::invalid_argument("NoiseSpec: rate_jitter must be >= 0");
    }
}

uint64_t pixel_seed(uint64_t seed, int x, int y) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (static_cast<uint64_t>(static_cast<uint32_t>(x)) << 32 |
                        static_cast<uint32_t>(y)));
    return h;
}

SpikeLikeStream simulate_pixel(std::span<const double> rates, double threshold,
                               double initial_residual) {
    if (threshold <= 0.0) throw std::invalid_argument("simulate_pixel: threshold must be > 0");
    if (initial_residual < 0.0 || initial_residual >= threshold) {
        throw std::invalid_argument("simulate_pixel: initial residual must be in [0, threshold)");
    }
    const double eps = threshold * kFireTolerance;
    std::vector<int> bits(rates.size());
    // Status is recomputed from the running rate sum and fired count so
    // rounding error does not accumulate with the reset subtraction.
    double rate_sum = 0.0;
    long fired = 0;
    for (size_t n = 0; n < rates.size(); ++n) {
        double q = rates[n];
        if (q < 0.0 || q > threshold + eps) {
            throw std::invalid_argument("simulate_pixel: rate " + std::to_string(q) +
                                        " at step " + std::to_string(n) +
                                        " outside [0, threshold]");
        }
        rate_sum += q;
        double status = initial_residual + rate_sum - fired * threshold;
        if (status >= threshold - eps) {
            bits[n] = 1;
            ++fired;
        }
    }
    return SpikeLikeStream(std::move(bits), 1, 0);
}

SpikeVolume simulate_scene(const SceneSpec& scene, int frames, const SimulateOptions& opts) {
    if (frames < 0) throw std::invalid_argument("simulate_scene: frames must be >= 0");
    if (opts.noise) opts.noise->validate();
    SpikeVolume volume(scene.width, scene.height, frames);
    const double eps = opts.threshold * kFireTolerance;
    std::vector<double> rates(frames);
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            for (int n = 0; n < frames; ++n) {
                double q = scene.rate(x, y, n);
                if (q < 0.0 || q > opts.threshold + eps) {
                    throw std::invalid_argument(
                        "simulate_scene: rate " + std::to_string(q) + " at pixel (" +
                        std::to_string(x) + ", " + std::to_string(y) + ") frame " +
                        std::to_string(n) + " outside [0, threshold]");
                }
                rates[n] = q;
            }
            double residual = 0.0;
            if (opts.random_initial_residual) {
                std::mt19937_64 rng(pixel_seed(opts.seed ^ 0x5eedb0d1ULL, x, y));
                std::uniform_real_distribution<double> dist(0.0, opts.threshold);
                residual = std::min(dist(rng), std::nextafter(opts.threshold, 0.0));
            }
            if (opts.noise) {
                std::mt19937_64 rng(pixel_seed(opts.noise->seed, x, y));
                std::normal_distribution<double> jitter(0.0, opts.noise->rate_jitter);
                std::bernoulli_distribution flip(opts.noise->flip_probability);
                if (opts.noise->rate_jitter > 0.0) {
                    for (int n = 0; n < frames; ++n) {
                        double q = rates[n] * (1.0 + jitter(rng));
                        rates[n] = std::clamp(q, 0.0, opts.threshold);
                    }
                }
                SpikeLikeStream s = simulate_pixel(rates, opts.threshold, residual);
                for (int n = 0; n < frames; ++n) {
                    bool bit = s.values[n] != 0;
                    if (opts.noise->flip_probability > 0.0 && flip(rng)) bit = !bit;
                    volume.set(x, y, n, bit);
                }
            } else {
                SpikeLikeStream s = simulate_pixel(rates, opts.threshold, residual);
                for (int n = 0; n < frames; ++n) volume.set(x, y, n, s.values[n] != 0);
            }
        }
    }
    return volume;
}

IntensityImage ideal_intensity(const SceneSpec& scene, int frame, double threshold) {
    IntensityImage img(scene.width, scene.height);
    for (int y = 0; y < scene.height; ++y) {
        for (int x = 0; x < scene.width; ++x) {
            double v = 255.0 * scene.rate(x, y, frame) / threshold;
            img.at(x, y) = std::clamp(v, 0.0, 255.0);
        }
    }
    return img;
}

}  // namespace spikecam
