#include "spikecam/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace spikecam {

double two_dimensional_entropy(const IntensityImage& image) {
    if (image.width < 3 || image.height < 3) {
        throw std::invalid_argument("two_dimensional_entropy: image must be at least 3x3");
    }
    std::vector<int> q(image.values.size());
    for (size_t i = 0; i < q.size(); ++i) {
        q[i] = static_cast<int>(std::round(std::clamp(image.values[i], 0.0, 255.0)));
    }
    std::vector<long> hist(256 * 256, 0);
    long total = 0;
    for (int y = 1; y < image.height - 1; ++y) {
        for (int x = 1; x < image.width - 1; ++x) {
            int g = q[static_cast<size_t>(y) * image.width + x];
            long sum = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    sum += q[static_cast<size_t>(y + dy) * image.width + (x + dx)];
                }
            }
            int gbar = static_cast<int>(std::lround(sum / 9.0));
            ++hist[static_cast<size_t>(g) * 256 + gbar];
            ++total;
        }
    }
    double entropy = 0.0;
    for (long count : hist) {
        if (count == 0) continue;
        double p = static_cast<double>(count) / total;
        entropy -= p * std::log2(p);
    }
    return entropy;
}

double mse(const IntensityImage& image, const IntensityImage& reference) {
    if (image.width != reference.width || image.height != reference.height) {
        throw std::invalid_argument("mse: dimension mismatch");
    }
    double acc = 0.0;
    for (size_t i = 0; i < image.values.size(); ++i) {
        double d = image.values[i] - reference.values[i];
        acc += d * d;
    }
    return acc / static_cast<double>(image.values.size());
}

double psnr(const IntensityImage& image, const IntensityImage& reference) {
    double m = mse(image, reference);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / m);
}

BenchResult bench(const SpikeVolume& volume, ReconMethod method, int repeats, int workers) {
    if (repeats < 3) throw std::invalid_argument("bench: repeats must be >= 3");
    std::vector<double> fps(static_cast<size_t>(repeats));
    // output planes allocated once so repeats measure the kernel, not
    // page faults on a fresh quarter-gigabyte buffer
    std::vector<IntensityImage> images;
    for (int r = 0; r < repeats; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        reconstruct(volume, method, workers, images);
        auto t1 = std::chrono::steady_clock::now();
        double seconds = std::chrono::duration<double>(t1 - t0).count();
        fps[static_cast<size_t>(r)] = volume.frames() / std::max(seconds, 1e-12);
    }
    std::sort(fps.begin(), fps.end());
    double median = repeats % 2 ? fps[static_cast<size_t>(repeats / 2)]
                                : 0.5 * (fps[static_cast<size_t>(repeats / 2) - 1] +
                                         fps[static_cast<size_t>(repeats / 2)]);
    return {method.name(), volume.width(), volume.height(), volume.frames(),
            workers,        repeats,       median};
}

}  // namespace spikecam
