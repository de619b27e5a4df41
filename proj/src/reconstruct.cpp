#include "spikecam/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace spikecam {

namespace {

// Lazy value-pair acceptance: the first element fixes one value, the next
// distinct element within +/-1 fixes the pair, anything else violates.
struct PairScanner {
    int v1 = 0, v2 = 0;
    bool h1 = false, h2 = false;

    bool accept(int t) {
        if (!h1) {
            v1 = t;
            h1 = true;
            return true;
        }
        if (t == v1 || (h2 && t == v2)) return true;
        if (!h2 && std::abs(t - v1) == 1) {
            v2 = t;
            h2 = true;
            return true;
        }
        return false;
    }
    void reset() { h1 = h2 = false; }
};

using Run = std::pair<size_t, size_t>;  // half-open index range into S1

void fsr_runs_into(const int* s1, size_t count, std::vector<Run>& runs) {
    if (count == 0) return;
    PairScanner sc;
    size_t start = 0;
    for (size_t i = 0; i < count; ++i) {
        if (!sc.accept(s1[i])) {
            runs.emplace_back(start, i);
            start = i;
            sc.reset();
            sc.accept(s1[i]);
        }
    }
    runs.emplace_back(start, count);
}

std::vector<Run> fsr_runs(const std::vector<int>& s1) {
    std::vector<Run> runs;
    fsr_runs_into(s1.data(), s1.size(), runs);
    return runs;
}

// Second-level scan of one first-order run. Occurrence gaps of each of the
// run's (at most two) values are checked with the same pair rule; a gap
// violation breaks the run before the first-level interval closing it.
void ssr_refine_into(const int* s1, const std::vector<Run>& runs, std::vector<Run>& out) {
    struct Level2 {
        int value = 0;
        long last = -1;
        PairScanner sc;
    };
    for (auto [a, b] : runs) {
        size_t start = a;
        while (start < b) {
            Level2 lv[2];
            int used = 0;
            size_t broke = b;
            for (size_t i = start; i < b; ++i) {
                int v = s1[i];
                Level2* sl = nullptr;
                for (int k = 0; k < used; ++k) {
                    if (lv[k].value == v) sl = &lv[k];
                }
                if (!sl) {
                    sl = &lv[used++];
                    sl->value = v;
                }
                if (sl->last >= 0) {
                    int gap = static_cast<int>(static_cast<long>(i) - sl->last);
                    if (!sl->sc.accept(gap)) {
                        broke = i;
                        break;
                    }
                }
                sl->last = static_cast<long>(i);
            }
            out.emplace_back(start, broke);
            start = broke;
        }
    }
}

std::vector<Run> ssr_refine(const std::vector<int>& s1, const std::vector<Run>& runs) {
    std::vector<Run> out;
    ssr_refine_into(s1.data(), runs, out);
    return out;
}

std::vector<Segment> build_segments(const std::vector<long>& spikes,
                                    const std::vector<int>& s1,
                                    const std::vector<Run>& runs, long total_frames) {
    std::vector<Segment> segs;
    if (total_frames == 0) return segs;
    if (spikes.empty()) {
        segs.emplace_back(0, total_frames, IntervalStream{}, 0.0);
        return segs;
    }
    double carry = 0.0;
    if (spikes.front() > 0) {
        segs.emplace_back(0, spikes.front(), IntervalStream{}, carry);
    }
    for (auto [a, b] : runs) {
        IntervalStream ivals(std::vector<int>(s1.begin() + a, s1.begin() + b));
        long sum = 0;
        for (int t : ivals.intervals) sum += t;
        double intensity = 255.0 * static_cast<double>(ivals.size()) / sum;
        carry = intensity;
        segs.emplace_back(spikes[a], spikes[b], std::move(ivals), intensity);
    }
    segs.emplace_back(spikes.back(), total_frames, IntervalStream{}, carry);
    return segs;
}

void spikes_and_intervals(const SpikeLikeStream& stream, std::vector<long>& spikes,
                          std::vector<int>& s1) {
    spikes = stream.firing_positions();
    s1.clear();
    for (size_t i = 1; i < spikes.size(); ++i) {
        s1.push_back(static_cast<int>(spikes[i] - spikes[i - 1]));
    }
}

void fill_tfi(const std::vector<long>& spikes, long frames, std::vector<double>& out) {
    out.assign(static_cast<size_t>(frames), 0.0);
    size_t next = 1;
    double value = 0.0;
    for (long n = 0; n < frames; ++n) {
        while (next < spikes.size() && spikes[next] <= n) {
            value = 255.0 / static_cast<double>(spikes[next] - spikes[next - 1]);
            ++next;
        }
        out[static_cast<size_t>(n)] = value;
    }
}

void fill_tfp(const std::vector<int>& bits, int window, std::vector<double>& out) {
    const long frames = static_cast<long>(bits.size());
    out.assign(bits.size(), 0.0);
    long count = 0;
    for (long n = 0; n < frames; ++n) {
        count += bits[static_cast<size_t>(n)];
        if (n - window >= 0) count -= bits[static_cast<size_t>(n - window)];
        long len = std::min<long>(window, n + 1);
        out[static_cast<size_t>(n)] = 255.0 * static_cast<double>(count) / len;
    }
}

void fill_segments(const std::vector<Segment>& segs, std::vector<double>& out, long frames) {
    out.assign(static_cast<size_t>(frames), 0.0);
    for (const Segment& s : segs) {
        for (long n = s.start_frame; n < s.end_frame; ++n) {
            out[static_cast<size_t>(n)] = s.intensity;
        }
    }
}

}  // namespace

ReconMethod ReconMethod::parse(const std::string& name, int window) {
    if (name == "fsr") return {Method::fsr};
    if (name == "ssr") return {Method::ssr};
    if (name == "tfi") return {Method::tfi};
    if (name == "tfp") {
        if (window < 1) throw std::invalid_argument("tfp window must be >= 1");
        return {Method::tfp, window};
    }
    throw std::invalid_argument("unknown reconstruction method: " + name);
}

std::string ReconMethod::name() const {
    switch (kind) {
        case Method::fsr: return "fsr";
        case Method::ssr: return "ssr";
        case Method::tfi: return "tfi";
        case Method::tfp: return "tfp-" + std::to_string(tfp_window);
    }
    return "?";
}

std::vector<Segment> segment_fsr(const SpikeLikeStream& stream) {
    std::vector<long> spikes;
    std::vector<int> s1;
    spikes_and_intervals(stream, spikes, s1);
    return build_segments(spikes, s1, fsr_runs(s1), static_cast<long>(stream.size()));
}

std::vector<Segment> segment_ssr(const SpikeLikeStream& stream) {
    std::vector<long> spikes;
    std::vector<int> s1;
    spikes_and_intervals(stream, spikes, s1);
    return build_segments(spikes, s1, ssr_refine(s1, fsr_runs(s1)),
                          static_cast<long>(stream.size()));
}

double segment_intensity(const Segment& segment) {
    if (segment.degenerate()) {
        throw std::invalid_argument("segment_intensity: degenerate segment has no interval");
    }
    long sum = 0;
    for (int t : segment.intervals.intervals) sum += t;
    return 255.0 * static_cast<double>(segment.intervals.size()) / sum;
}

std::vector<SegmentEvent> fsr_events(const SpikeLikeStream& stream) {
    std::vector<SegmentEvent> events;
    for (const Segment& s : segment_fsr(stream)) {
        events.push_back({s.duration(), s.intensity});
    }
    return events;
}

bool PixelReconState::accept_interval(int t) {
    if (!have_v1) {
        pair_v1 = t;
        have_v1 = true;
        return true;
    }
    if (t == pair_v1 || (have_v2 && t == pair_v2)) return true;
    if (!have_v2 && std::abs(t - pair_v1) == 1) {
        pair_v2 = t;
        have_v2 = true;
        return true;
    }
    return false;
}

std::optional<SegmentEvent> PixelReconState::push_frame(bool bit) {
    std::optional<SegmentEvent> event;
    const long n = frame_++;
    if (!bit) return event;
    if (last_spike < 0) {
        if (n > 0) event = SegmentEvent{n, 0.0};  // degenerate lead
        last_spike = n;
        run_start_spike = n;
        return event;
    }
    int t = static_cast<int>(n - last_spike);
    long prev = last_spike;
    last_spike = n;
    if (accept_interval(t)) {
        interval_sum += t;
        ++interval_count;
        return event;
    }
    // the violating interval closes the run at its opening spike and
    // reseeds the next run
    double intensity = 255.0 * static_cast<double>(interval_count) / interval_sum;
    event = SegmentEvent{prev - run_start_spike, intensity};
    last_intensity = intensity;
    run_start_spike = prev;
    have_v1 = have_v2 = false;
    accept_interval(t);
    interval_sum = t;
    interval_count = 1;
    return event;
}

std::vector<SegmentEvent> PixelReconState::flush() {
    std::vector<SegmentEvent> events;
    if (frame_ == 0) return events;
    if (last_spike < 0) {
        events.push_back({frame_, 0.0});
        return events;
    }
    if (interval_count > 0) {
        double intensity = 255.0 * static_cast<double>(interval_count) / interval_sum;
        events.push_back({last_spike - run_start_spike, intensity});
        last_intensity = intensity;
    }
    events.push_back({frame_ - last_spike, last_intensity});
    return events;
}

std::vector<double> reconstruct_pixel(const SpikeLikeStream& stream, ReconMethod method) {
    const long frames = static_cast<long>(stream.size());
    std::vector<double> out;
    switch (method.kind) {
        case Method::fsr:
            fill_segments(segment_fsr(stream), out, frames);
            break;
        case Method::ssr:
            fill_segments(segment_ssr(stream), out, frames);
            break;
        case Method::tfi: {
            fill_tfi(stream.firing_positions(), frames, out);
            break;
        }
        case Method::tfp: {
            std::vector<int> bits(stream.values.size());
            for (size_t i = 0; i < bits.size(); ++i) {
                bits[i] = stream.values[i] == stream.firing_value ? 1 : 0;
            }
            fill_tfp(bits, method.tfp_window, out);
            break;
        }
    }
    return out;
}

namespace {

// Allocation-free per-pixel kernel: spike positions are gathered in one
// pass over the bit planes and all scratch vectors are reused across
// pixels. Segment intensities reuse fsr_runs / ssr_refine, so the output
// matches reconstruct_pixel exactly.
// One pixel's time row (contiguous bits in, contiguous values out).
void reconstruct_row(const uint8_t* bits, long T, ReconMethod method, long* spikes,
                     int* s1, std::vector<Run>& runs, std::vector<Run>& refined,
                     double* out) {
    if (method.kind == Method::tfp) {
        const long window = method.tfp_window;
        long count = 0;
        for (long n = 0; n < T; ++n) {
            count += bits[n];
            if (n >= window) count -= bits[n - window];
            out[n] = 255.0 * static_cast<double>(count) / std::min(window, n + 1);
        }
        return;
    }
    size_t ns = 0;
    for (long n = 0; n < T; ++n) {
        spikes[ns] = n;
        ns += bits[n] != 0;
    }
    if (method.kind == Method::tfi) {
        size_t next = 1;
        double value = 0.0;
        for (long n = 0; n < T; ++n) {
            while (next < ns && spikes[next] <= n) {
                value = 255.0 / static_cast<double>(spikes[next] - spikes[next - 1]);
                ++next;
            }
            out[n] = value;
        }
        return;
    }
    const long lead = ns > 0 ? spikes[0] : T;
    for (long n = 0; n < lead; ++n) out[n] = 0.0;
    double carry = 0.0;
    if (method.kind == Method::fsr) {
        // single fused pass: intervals are scanned and filled in place
        if (ns > 1) {
            PairScanner sc;
            size_t run_a = 0;
            for (size_t i = 1; i < ns; ++i) {
                int t = static_cast<int>(spikes[i] - spikes[i - 1]);
                if (!sc.accept(t)) {
                    carry = 255.0 * static_cast<double>(i - 1 - run_a) /
                            static_cast<double>(spikes[i - 1] - spikes[run_a]);
                    for (long n = spikes[run_a]; n < spikes[i - 1]; ++n) out[n] = carry;
                    run_a = i - 1;
                    sc.reset();
                    sc.accept(t);
                }
            }
            carry = 255.0 * static_cast<double>(ns - 1 - run_a) /
                    static_cast<double>(spikes[ns - 1] - spikes[run_a]);
            for (long n = spikes[run_a]; n < spikes[ns - 1]; ++n) out[n] = carry;
        }
    } else {
        const size_t ni = ns > 0 ? ns - 1 : 0;
        for (size_t i = 0; i < ni; ++i) s1[i] = static_cast<int>(spikes[i + 1] - spikes[i]);
        runs.clear();
        fsr_runs_into(s1, ni, runs);
        refined.clear();
        ssr_refine_into(s1, runs, refined);
        for (auto [a, b] : refined) {
            carry = 255.0 * static_cast<double>(b - a) /
                    static_cast<double>(spikes[b] - spikes[a]);
            for (long n = spikes[a]; n < spikes[b]; ++n) out[n] = carry;
        }
    }
    if (ns > 0) {
        for (long n = spikes[ns - 1]; n < T; ++n) out[n] = carry;
    }
}

// Frame-major storage makes one pixel's history a 100 KB-strided column,
// so columns are transposed into contiguous rows a block at a time and
// the results transposed back. Block-local buffers stay cache resident.
void reconstruct_into(const SpikeVolume& volume, ReconMethod method, long pix_begin,
                      long pix_end, std::vector<IntensityImage>& images) {
    const long T = volume.frames();
    const size_t plane = static_cast<size_t>(volume.width()) * volume.height();
    const uint8_t* raw = volume.raw().data();
    std::vector<double*> planes(static_cast<size_t>(T));
    for (long n = 0; n < T; ++n) {
        planes[static_cast<size_t>(n)] = images[static_cast<size_t>(n)].values.data();
    }
    constexpr long kBlock = 256;
    std::vector<uint8_t> bits(static_cast<size_t>(kBlock * T));
    std::vector<double> out(static_cast<size_t>(kBlock * T));
    std::vector<long> spikes(static_cast<size_t>(T));
    std::vector<int> s1(static_cast<size_t>(T));
    std::vector<Run> runs, refined;
    for (long p0 = pix_begin; p0 < pix_end; p0 += kBlock) {
        const long nb = std::min(kBlock, pix_end - p0);
        for (long n = 0; n < T; ++n) {
            const uint8_t* src = raw + static_cast<size_t>(n) * plane + p0;
            for (long j = 0; j < nb; ++j) bits[static_cast<size_t>(j * T + n)] = src[j];
        }
        for (long j = 0; j < nb; ++j) {
            reconstruct_row(bits.data() + j * T, T, method, spikes.data(), s1.data(), runs,
                            refined, out.data() + j * T);
        }
        for (long n = 0; n < T; ++n) {
            double* dst = planes[static_cast<size_t>(n)] + p0;
            for (long j = 0; j < nb; ++j) dst[j] = out[static_cast<size_t>(j * T + n)];
        }
    }
}

}  // namespace

std::vector<IntensityImage> reconstruct_serial(const SpikeVolume& volume, ReconMethod method) {
    std::vector<IntensityImage> images(static_cast<size_t>(volume.frames()),
                                       IntensityImage(volume.width(), volume.height()));
    reconstruct_into(volume, method, 0, static_cast<long>(volume.width()) * volume.height(),
                     images);
    return images;
}

std::vector<IntensityImage> reconstruct(const SpikeVolume& volume, ReconMethod method,
                                        int workers) {
    std::vector<IntensityImage> images;
    reconstruct(volume, method, workers, images);
    return images;
}

void reconstruct(const SpikeVolume& volume, ReconMethod method, int workers,
                 std::vector<IntensityImage>& images) {
    const long pixels = static_cast<long>(volume.width()) * volume.height();
    const size_t frames = static_cast<size_t>(volume.frames());
    if (images.size() != frames || (frames > 0 && (images[0].width != volume.width() ||
                                                   images[0].height != volume.height()))) {
        images.assign(frames, IntensityImage(volume.width(), volume.height()));
    }
#ifdef _OPENMP
    int nw = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel num_threads(nw)
    {
        int tid = omp_get_thread_num();
        int nt = omp_get_num_threads();
        long chunk = (pixels + nt - 1) / nt;
        long begin = tid * chunk;
        long end = std::min(pixels, begin + chunk);
        if (begin < end) reconstruct_into(volume, method, begin, end, images);
    }
#else
    (void)workers;
    reconstruct_into(volume, method, 0, pixels, images);
#endif
}

}  // namespace spikecam
