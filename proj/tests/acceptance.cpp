// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Each check is self-contained and uses only the public API.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "spikecam/codec.hpp"
#include "spikecam/core.hpp"
#include "spikecam/io.hpp"
#include "spikecam/metrics.hpp"
#include "spikecam/reconstruct.hpp"
#include "spikecam/simulator.hpp"
#include "spikecam/stability.hpp"

using namespace spikecam;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& what, bool ok, const std::string& detail = "") {
    std::printf("[%s] %d: %s%s%s\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::vector<double> rate_sweep(int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(std::nextafter(0.0, 1.0), 1.0);
    std::vector<double> qs(static_cast<size_t>(count));
    for (double& q : qs) q = dist(rng);
    return qs;
}

void criterion_theorem(const std::vector<double>& qs) {
    auto start = std::chrono::steady_clock::now();
    int bad = 0;
    for (double q : qs) {
        std::vector<double> rates(2048, q);
        StabilityReport r = stability_order(simulate_pixel(rates), 8);
        if (r.first_violation) ++bad;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(1, "constant-rate streams are absolutely stable to depth 8",
           bad == 0 && secs < 60.0,
           std::to_string(qs.size()) + " rates, " + std::to_string(bad) + " violations, " +
               std::to_string(secs) + " s");
}

void criterion_interval_values(const std::vector<double>& qs) {
    int bad = 0;
    for (double q : qs) {
        double t_star = 1.0 / q;
        double b = t_star - std::floor(t_star);
        std::vector<double> rates(2048, q);
        IntervalStream s1 = interval_stream(simulate_pixel(rates));
        auto [lo, hi] = lemma1_interval_bounds(q, 1.0);
        bool seen_lo = false, seen_hi = false;
        for (int t : s1.intervals) {
            if (t == lo) seen_lo = true;
            else if (t == hi) seen_hi = true;
            else ++bad;
        }
        double margin = std::min(b, 1.0 - b);
        if (b > 1e-9 && margin > 1e-9 && 2048.0 > 2.0 * t_star / margin) {
            if (!seen_lo || !seen_hi) ++bad;
        }
    }
    report(2, "observed intervals are exactly the two predicted values", bad == 0,
           std::to_string(bad) + " mismatches");
}

void criterion_second_level(const std::vector<double>& qs) {
    int bad = 0;
    for (double q : qs) {
        if (!verify_lemma2(q, 1.0, 2048)) ++bad;
    }
    report(3, "second-level interval predictions hold across the sweep", bad == 0,
           std::to_string(bad) + " failures");
}

void criterion_accuracy() {
    std::vector<double> rates(1024, 0.3);
    auto segs = segment_fsr(simulate_pixel(rates));
    const Segment* run = nullptr;
    int runs = 0;
    for (const Segment& s : segs) {
        if (!s.degenerate()) {
            run = &s;
            ++runs;
        }
    }
    bool ok = false;
    std::string detail = "no non-degenerate segment";
    if (runs == 1 && run) {
        double n = static_cast<double>(run->intervals.size());
        double err = std::abs(segment_intensity(*run) - 76.5) / 76.5;
        ok = n >= 300 && err <= 2.0 / (n * 3.0);
        detail = "N=" + std::to_string(static_cast<long>(n)) +
                 ", relative error=" + std::to_string(err);
    } else if (runs != 1) {
        detail = std::to_string(runs) + " segments";
    }
    report(4, "constant scene reconstructs one segment within the interval-count bound", ok,
           detail);
}

void criterion_streaming() {
    std::mt19937_64 rng(1009);
    int bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        SpikeLikeStream s = spikecam::testing::random_mixed_stream(rng);
        std::vector<SegmentEvent> batch = fsr_events(s);
        PixelReconState state;
        std::vector<SegmentEvent> streamed;
        size_t i = 0;
        while (i < s.values.size()) {
            size_t end = std::min(s.values.size(), i + 32);
            for (; i < end; ++i) {
                if (auto e = state.push_frame(s.values[i] == s.firing_value)) {
                    streamed.push_back(*e);
                }
            }
        }
        for (const SegmentEvent& e : state.flush()) streamed.push_back(e);
        if (streamed != batch) ++bad;
    }
    report(5, "32-frame streaming reproduces batch segmentation bit-exactly", bad == 0,
           std::to_string(bad) + " of 1000 streams diverged");
}

void criterion_codec() {
    std::mt19937_64 rng(1013);
    std::uniform_int_distribution<long> dur(1, 900);
    std::uniform_real_distribution<double> inten(0.0, 255.0);
    int bad = 0;
    bool saw_split = false;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<SegmentEvent> events;
        int k = 1 + static_cast<int>(rng() % 6);
        for (int i = 0; i < k; ++i) {
            events.push_back({dur(rng), inten(rng)});
            if (events.back().duration > 255) saw_split = true;
        }
        std::vector<uint8_t> frames = decode(encode_events(events));
        size_t pos = 0;
        for (const SegmentEvent& e : events) {
            for (long n = 0; n < e.duration; ++n) {
                if (std::abs(frames[pos++] - e.intensity) > 0.5) ++bad;
            }
        }
    }
    report(6, "codec roundtrip error is at most half a gray level", bad == 0 && saw_split,
           std::to_string(bad) + " bad frames, splits exercised: " + (saw_split ? "yes" : "no"));
}

void criterion_motion_blur() {
    const int w = 64, h = 48, frames = 288, bar_width = 6, step = 8;
    SceneSpec scene{w, h, [&](int x, int y, int n) {
                        double bg = 0.12 + 0.55 * ((x * 7 + y * 13) % 32) / 31.0;
                        int pos = (n / step) % w;
                        int d = (x - pos + w) % w;
                        return d < bar_width ? 0.92 : bg;
                    }};
    SpikeVolume v = simulate_scene(scene, frames);
    std::vector<IntensityImage> fsr = reconstruct(v, {Method::fsr});
    std::vector<IntensityImage> tfp = reconstruct(v, {Method::tfp, 32});
    double se_fsr = 0.0, se_tfp = 0.0, te_fsr = 0.0, te_tfp = 0.0;
    int samples = 0;
    for (int n = 128; n < frames; n += 16) {
        IntensityImage truth = ideal_intensity(scene, n);
        se_fsr += mse(fsr[static_cast<size_t>(n)], truth);
        se_tfp += mse(tfp[static_cast<size_t>(n)], truth);
        te_fsr += two_dimensional_entropy(fsr[static_cast<size_t>(n)]);
        te_tfp += two_dimensional_entropy(tfp[static_cast<size_t>(n)]);
        ++samples;
    }
    double psnr_fsr = 10.0 * std::log10(255.0 * 255.0 / (se_fsr / samples));
    double psnr_tfp = 10.0 * std::log10(255.0 * 255.0 / (se_tfp / samples));
    te_fsr /= samples;
    te_tfp /= samples;
    bool ok = psnr_fsr >= psnr_tfp + 3.0 && te_fsr >= te_tfp;
    char buf[160];
    std::snprintf(buf, sizeof buf, "PSNR %.2f vs %.2f dB, TE %.3f vs %.3f bits", psnr_fsr,
                  psnr_tfp, te_fsr, te_tfp);
    report(7, "moving-bar scene: segmentation beats the windowed baseline", ok, buf);
}

void criterion_refinement() {
    std::mt19937_64 rng(1019);
    int bad = 0;
    for (int trial = 0; trial < 500; ++trial) {
        SpikeLikeStream s = spikecam::testing::random_mixed_stream(rng);
        // sparse bit flips make the streams noisy without erasing structure
        for (int& v : s.values) {
            if (rng() % 64 == 0) v ^= 1;
        }
        auto fsr = segment_fsr(s);
        auto ssr = segment_ssr(s);
        size_t fi = 0;
        for (const Segment& seg : ssr) {
            while (fi < fsr.size() && fsr[fi].end_frame <= seg.start_frame) ++fi;
            if (fi >= fsr.size() || seg.start_frame < fsr[fi].start_frame ||
                seg.end_frame > fsr[fi].end_frame) {
                ++bad;
                break;
            }
        }
    }
    std::vector<double> rates;
    rates.insert(rates.end(), 600, 1.0 / 3.1);
    rates.insert(rates.end(), 600, 1.0 / 3.9);
    SpikeLikeStream adversarial = simulate_pixel(rates);
    size_t fsr_runs = 0, ssr_runs = 0;
    for (const Segment& s : segment_fsr(adversarial)) fsr_runs += !s.degenerate();
    for (const Segment& s : segment_ssr(adversarial)) ssr_runs += !s.degenerate();
    bool ok = bad == 0 && fsr_runs == 1 && ssr_runs >= 2;
    report(8, "SSR refines FSR and splits the adversarial two-phase stream", ok,
           std::to_string(bad) + " containment failures, runs " + std::to_string(fsr_runs) +
               " vs " + std::to_string(ssr_runs));
}

void criterion_throughput() {
    SceneSpec scene{400, 250, [](int x, int y, int n) {
                        (void)n;
                        return 0.05 + 0.9 * ((x * 31 + y * 17) % 20) / 19.0;
                    }};
    SpikeVolume v = simulate_scene(scene, 320);
    // capability floor on shared hardware: keep the best of a few
    // adjacent attempts so background load does not fail the check
    bool ok = false;
    double best_fsr = 0.0, best_ssr = 0.0, best_ratio = 0.0;
    for (int attempt = 0; attempt < 5 && !ok; ++attempt) {
        BenchResult fsr = bench(v, {Method::fsr}, 3, 1);
        BenchResult ssr = bench(v, {Method::ssr}, 3, 1);
        double ratio = std::max(fsr.frames_per_second / ssr.frames_per_second,
                                ssr.frames_per_second / fsr.frames_per_second);
        if (fsr.frames_per_second > best_fsr) {
            best_fsr = fsr.frames_per_second;
            best_ssr = ssr.frames_per_second;
            best_ratio = ratio;
        }
        ok = fsr.frames_per_second >= 1000.0 && ratio <= 2.0;
    }
    char buf[120];
    std::snprintf(buf, sizeof buf, "FSR %.0f fps, SSR %.0f fps, ratio %.2f", best_fsr,
                  best_ssr, best_ratio);
    report(9, "benchmark floor: 1000 fps FSR, FSR/SSR within 2x", ok, buf);
}

void criterion_formats() {
    fs::path dir = fs::temp_directory_path() / "spikecam_acceptance";
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;
    try {
        SpikeVolume golden(2, 1, 1);
        golden.set(0, 0, 0, true);
        fs::path f = dir / "golden.spk";
        write_spk(golden, 20000, f);
        std::ifstream in(f, std::ios::binary);
        std::vector<uint8_t> data{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
        std::vector<uint8_t> expect{'S', 'P', 'K', '1', 0x02, 0x00, 0x01, 0x00, 0x20, 0x4e,
                                    0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01};
        if (data != expect) {
            ok = false;
            detail += "golden SPK1 bytes differ; ";
        }

        std::mt19937_64 rng(1021);
        SpikeVolume big(400, 250, 32);
        for (uint8_t& b : big.raw_mutable()) b = rng() & 1;
        fs::path spk = dir / "big.spk";
        write_spk(big, 20000, spk);
        auto [back, fps] = read_spk(spk);
        if (!(back == big) || fps != 20000) {
            ok = false;
            detail += "SPK1 roundtrip differs; ";
        }

        std::ifstream sin(spk, std::ios::binary);
        std::vector<uint8_t> payload{std::istreambuf_iterator<char>(sin),
                                     std::istreambuf_iterator<char>()};
        fs::path raw = dir / "big.raw";
        std::ofstream(raw, std::ios::binary)
            .write(reinterpret_cast<const char*>(payload.data() + 16),
                   static_cast<std::streamsize>(payload.size() - 16));
        if (!(read_raw(raw, 400, 250) == big)) {
            ok = false;
            detail += "raw roundtrip differs; ";
        }

        RecordVolume rv;
        rv.width = 2;
        rv.height = 2;
        rv.frame_count = 300;
        rv.words.resize(4);
        for (auto& words : rv.words) {
            for (int i = 0; i < 3; ++i) {
                words.push_back(static_cast<uint16_t>(((1 + rng() % 255) << 8) | (rng() % 256)));
            }
        }
        fs::path spkr = dir / "rec.spkr";
        write_spkr(rv, spkr);
        RecordVolume rb = read_spkr(spkr);
        if (rb.words != rv.words || rb.frame_count != rv.frame_count) {
            ok = false;
            detail += "SPKR roundtrip differs; ";
        }
    } catch (const std::exception& e) {
        ok = false;
        detail += e.what();
    }
    fs::remove_all(dir);
    report(10, "container formats roundtrip bit-exactly against documented bytes", ok, detail);
}

}  // namespace

int main() {
    std::vector<double> qs = rate_sweep(200, 997);
    criterion_theorem(qs);
    criterion_interval_values(qs);
    criterion_second_level(qs);
    criterion_accuracy();
    criterion_streaming();
    criterion_codec();
    criterion_motion_blur();
    criterion_refinement();
    criterion_throughput();
    criterion_formats();
    if (failures > 0) {
        std::printf("%d criteria failed\n", failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
