#pragma once

#include <random>
#include <vector>

#include "spikecam/core.hpp"

namespace spikecam::testing {

// Builds a binary stream with spikes at first_pos and then after each
// listed gap, padded with zeros to total_frames (grown if needed).
inline SpikeLikeStream stream_from_intervals(long first_pos, const std::vector<int>& gaps,
                                             long total_frames) {
    std::vector<long> spikes{first_pos};
    for (int g : gaps) spikes.push_back(spikes.back() + g);
    long frames = std::max(total_frames, spikes.back() + 1);
    std::vector<int> bits(static_cast<size_t>(frames), 0);
    for (long p : spikes) bits[static_cast<size_t>(p)] = 1;
    return SpikeLikeStream(std::move(bits), 1, 0);
}

// Random binary stream built from a few random-rate runs, the generic
// mixed-rate input for streaming/batch checks.
inline SpikeLikeStream random_mixed_stream(std::mt19937_64& rng, int min_frames = 64,
                                           int max_frames = 512) {
    std::uniform_int_distribution<int> len_dist(min_frames, max_frames);
    std::uniform_real_distribution<double> q_dist(0.02, 1.0);
    std::uniform_int_distribution<int> runs_dist(1, 4);
    int frames = len_dist(rng);
    int runs = runs_dist(rng);
    std::vector<int> bits;
    bits.reserve(static_cast<size_t>(frames));
    double residual = 0.0;
    for (int r = 0; r < runs; ++r) {
        int span = frames / runs;
        double q = q_dist(rng);
        for (int n = 0; n < span; ++n) {
            residual += q;
            if (residual >= 1.0 - 1e-9) {
                bits.push_back(1);
                residual -= 1.0;
            } else {
                bits.push_back(0);
            }
        }
    }
    return SpikeLikeStream(std::move(bits), 1, 0);
}

}  // namespace spikecam::testing
