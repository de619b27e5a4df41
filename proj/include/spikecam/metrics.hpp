#pragma once

#include <optional>
#include <string>

#include "spikecam/reconstruct.hpp"

namespace spikecam {

struct MetricReport {
    double te = 0.0;  // two-dimensional entropy, bits
    std::optional<double> psnr;
    std::optional<double> mse;
    std::optional<double> throughput;  // frames / second
};

// Joint entropy of (gray value, rounded 3x3 local mean) over the interior
// pixels of the 8-bit quantized image. 0 for a constant image; at most 16
// bits. Requires at least 3x3.
double two_dimensional_entropy(const IntensityImage& image);

double mse(const IntensityImage& image, const IntensityImage& reference);
// 10*log10(255^2 / MSE); +infinity for identical images.
double psnr(const IntensityImage& image, const IntensityImage& reference);

struct BenchResult {
    std::string method;
    int width = 0;
    int height = 0;
    int frames = 0;
    int workers = 0;
    int repeats = 0;
    double frames_per_second = 0.0;  // median over repeats
};

BenchResult bench(const SpikeVolume& volume, ReconMethod method, int repeats,
                  int workers = 1);

}  // namespace spikecam
