#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spikecam/codec.hpp"
#include "spikecam/io.hpp"
#include "spikecam/metrics.hpp"
#include "spikecam/reconstruct.hpp"
#include "spikecam/simulator.hpp"
#include "spikecam/stability.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace spikecam;

namespace {

constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct InputOpts {
    std::string path;
    bool raw = false;
    int width = kDefaultRawWidth;
    int height = kDefaultRawHeight;
    bool msb_first = false;
};

void add_input_flags(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("--in", in.path, "input spike file (SPK1, or raw with --raw)")->required();
    cmd->add_flag("--raw", in.raw, "treat input as a headerless camera dump");
    cmd->add_option("--width", in.width, "raw frame width");
    cmd->add_option("--height", in.height, "raw frame height");
    cmd->add_flag("--msb-first", in.msb_first, "raw dumps packed MSB-first within each byte");
}

SpikeVolume load_volume(const InputOpts& in) {
    if (in.raw) return read_raw(in.path, in.width, in.height, in.msb_first);
    return read_spk(in.path).first;
}

std::string frame_name(int n, ImageFormat fmt) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06d.%s", n, fmt == ImageFormat::pgm ? "pgm" : "png");
    return buf;
}

std::vector<ReconMethod> parse_methods(const std::string& list) {
    std::vector<ReconMethod> methods;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (tok.rfind("tfp-", 0) == 0) {
            methods.push_back(ReconMethod::parse("tfp", std::stoi(tok.substr(4))));
        } else {
            methods.push_back(ReconMethod::parse(tok));
        }
    }
    if (methods.empty()) throw std::invalid_argument("no reconstruction methods given");
    return methods;
}

std::string default_out_dir() {
    const char* env = std::getenv("SPIKECAM_OUT");
    return env ? env : ".";
}

int cmd_simulate(const std::string& scene_name, double q, double q2, int bar_width,
                 int bar_period, double wedge_angle, int wedge_period, int switch_frame,
                 int width, int height, int frames, double threshold, uint32_t fps,
                 double noise_flip, double noise_jitter, uint64_t seed, bool random_phase,
                 bool refs, const std::string& out_dir) {
    SceneSpec scene;
    if (scene_name == "constant") {
        scene = SceneSpec::constant(width, height, q);
    } else if (scene_name == "bar") {
        scene = SceneSpec::moving_bar(width, height, q, q2, bar_width, bar_period);
    } else if (scene_name == "wedge") {
        scene = SceneSpec::rotating_wedge(width, height, q, q2, wedge_angle, wedge_period);
    } else if (scene_name == "step") {
        scene = SceneSpec::two_phase(width, height, q, q2, switch_frame);
    } else {
        throw std::invalid_argument("unknown scene: " + scene_name);
    }

    SimulateOptions opts;
    opts.threshold = threshold;
    opts.seed = seed;
    opts.random_initial_residual = random_phase;
    NoiseSpec noise{noise_flip, noise_jitter, seed};
    if (noise_flip > 0.0 || noise_jitter > 0.0) opts.noise = &noise;

    SpikeVolume volume = simulate_scene(scene, frames, opts);
    fs::create_directories(out_dir);
    fs::path spk = fs::path(out_dir) / "spikes.spk";
    write_spk(volume, fps, spk);
    std::cout << "wrote " << spk.string() << " (" << width << "x" << height << "x" << frames
              << ")\n";
    if (refs && frames > 0) {
        fs::path ref_dir = fs::path(out_dir) / "ref";
        fs::create_directories(ref_dir);
        for (int n = 0; n < frames; ++n) {
            write_image(ideal_intensity(scene, n, threshold),
                        ref_dir / frame_name(n, ImageFormat::pgm), ImageFormat::pgm);
        }
        std::cout << "wrote " << frames << " reference frames to " << ref_dir.string() << "\n";
    }
    return 0;
}

int cmd_reconstruct(const InputOpts& in, const std::string& method_name, int window,
                    const std::string& out_dir, bool emit_records, const std::string& fmt_name,
                    int workers) {
    ReconMethod method = method_name.rfind("tfp-", 0) == 0
                             ? ReconMethod::parse("tfp", std::stoi(method_name.substr(4)))
                             : ReconMethod::parse(method_name, window);
    ImageFormat fmt = fmt_name == "png" ? ImageFormat::png : ImageFormat::pgm;
    if (fmt_name != "png" && fmt_name != "pgm") {
        throw std::invalid_argument("unknown image format: " + fmt_name);
    }
    SpikeVolume volume = load_volume(in);
    fs::create_directories(out_dir);

    json manifest;
    manifest["input"] = in.path;
    manifest["method"] = method.name();
    manifest["width"] = volume.width();
    manifest["height"] = volume.height();
    manifest["frames"] = volume.frames();
    manifest["workers"] = workers;

    if (emit_records) {
        if (method.kind != Method::fsr && method.kind != Method::ssr) {
            throw std::invalid_argument("--emit-records needs method fsr or ssr");
        }
        RecordVolume rv;
        rv.width = volume.width();
        rv.height = volume.height();
        rv.frame_count = static_cast<uint32_t>(volume.frames());
        rv.words.resize(static_cast<size_t>(rv.width) * rv.height);
        for (int y = 0; y < rv.height; ++y) {
            for (int x = 0; x < rv.width; ++x) {
                SpikeLikeStream stream = pixel_stream(volume, x, y);
                std::vector<SegmentEvent> events;
                if (method.kind == Method::fsr) {
                    events = fsr_events(stream);
                } else {
                    for (const Segment& s : segment_ssr(stream)) {
                        events.push_back({s.duration(), s.intensity});
                    }
                }
                rv.pixel(x, y) = encode_events(events);
            }
        }
        fs::path out = fs::path(out_dir) / "records.spkr";
        write_spkr(rv, out);
        manifest["records"] = out.filename().string();
        std::cout << "wrote " << out.string() << "\n";
    } else {
        auto images = reconstruct(volume, method, workers);
        json names = json::array();
        for (int n = 0; n < volume.frames(); ++n) {
            std::string name = frame_name(n, fmt);
            write_image(images[static_cast<size_t>(n)], fs::path(out_dir) / name, fmt);
            names.push_back(name);
        }
        manifest["images"] = names;
        std::cout << "wrote " << volume.frames() << " frames to " << out_dir << "\n";
    }
    std::ofstream mf(fs::path(out_dir) / "manifest.json");
    mf << manifest.dump(2) << "\n";
    return 0;
}

int cmd_verify_stability(int count, double q_min, double q_max, int length, int depth,
                         const std::string& stream_file) {
    bool ok = true;
    if (!stream_file.empty()) {
        SpikeVolume volume = read_spk(stream_file).first;
        for (int y = 0; y < volume.height() && ok; ++y) {
            for (int x = 0; x < volume.width(); ++x) {
                StabilityReport r = stability_order(pixel_stream(volume, x, y), depth);
                if (r.first_violation) {
                    std::cout << "FAIL pixel=(" << x << "," << y << ") depth="
                              << r.first_violation->depth << " path=\""
                              << r.first_violation->path << "\" index="
                              << r.first_violation->index << "\n";
                    ok = false;
                }
            }
        }
        std::cout << (ok ? "PASS" : "FAIL") << " stream-file stability depth=" << depth << "\n";
        return ok ? 0 : kExitVerifyFail;
    }

    for (int i = 0; i < count; ++i) {
        // logarithmic sweep of constant rates
        double t = count == 1 ? 1.0 : static_cast<double>(i) / (count - 1);
        double q = q_min * std::pow(q_max / q_min, t);
        std::vector<double> rates(static_cast<size_t>(length), q);
        SpikeLikeStream s0 = simulate_pixel(rates);
        StabilityReport r = stability_order(s0, depth);
        auto [lo, hi] = lemma1_interval_bounds(q, 1.0);
        bool bounds_ok = true;
        for (int iv : interval_stream(s0).intervals) {
            bounds_ok = bounds_ok && (iv == lo || iv == hi);
        }
        bool lemma2_ok = verify_lemma2(q, 1.0, length);
        if (r.first_violation || !bounds_ok || !lemma2_ok) {
            std::cout << "FAIL q=" << q << " violation=" << (r.first_violation ? 1 : 0)
                      << " lemma1=" << bounds_ok << " lemma2=" << lemma2_ok << "\n";
            ok = false;
        }
    }
    std::cout << (ok ? "PASS" : "FAIL") << " sweep count=" << count << " length=" << length
              << " depth=" << depth << "\n";
    return ok ? 0 : kExitVerifyFail;
}

int cmd_bench(const InputOpts& in, const std::string& methods_list, int repeats,
              const std::string& workers_list) {
    if (repeats < 3) throw std::invalid_argument("bench: repeats must be >= 3");
    SpikeVolume volume = load_volume(in);
    std::vector<int> workers;
    std::stringstream ss(workers_list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) workers.push_back(std::stoi(tok));
    }
    if (workers.empty()) workers.push_back(1);
    std::cout << "machine: hardware_concurrency=" << std::thread::hardware_concurrency()
#ifdef _OPENMP
              << " openmp=1"
#else
              << " openmp=0"
#endif
              << " geometry=" << volume.width() << "x" << volume.height() << "x"
              << volume.frames() << "\n";
    for (ReconMethod m : parse_methods(methods_list)) {
        for (int w : workers) {
            BenchResult r = bench(volume, m, repeats, w);
            std::cout << "method=" << r.method << " workers=" << r.workers
                      << " repeats=" << r.repeats << " fps=" << r.frames_per_second << "\n";
        }
    }
    return 0;
}

int cmd_compare(const InputOpts& in, const std::string& methods_list,
                const std::string& ref_dir, bool want_psnr, int warmup, int workers) {
    if (want_psnr && ref_dir.empty()) {
        throw std::invalid_argument("--psnr needs --ref with reference images");
    }
    SpikeVolume volume = load_volume(in);
    int first = std::min(warmup, std::max(0, volume.frames() - 1));
    for (ReconMethod m : parse_methods(methods_list)) {
        auto images = reconstruct(volume, m, workers);
        double te_sum = 0.0;
        double mse_sum = 0.0;
        int te_n = 0, ref_n = 0;
        for (int n = first; n < volume.frames(); ++n) {
            te_sum += two_dimensional_entropy(images[static_cast<size_t>(n)]);
            ++te_n;
            if (!ref_dir.empty()) {
                fs::path ref = fs::path(ref_dir) / frame_name(n, ImageFormat::pgm);
                if (fs::exists(ref)) {
                    mse_sum += mse(images[static_cast<size_t>(n)], read_image(ref));
                    ++ref_n;
                }
            }
        }
        if (want_psnr && ref_n == 0) {
            throw io_error("no reference frames found in " + ref_dir);
        }
        std::cout << "method=" << m.name() << " te=" << (te_n ? te_sum / te_n : 0.0);
        if (ref_n) {
            double avg_mse = mse_sum / ref_n;
            double p = avg_mse == 0.0 ? std::numeric_limits<double>::infinity()
                                      : 10.0 * std::log10(255.0 * 255.0 / avg_mse);
            std::cout << " mse=" << avg_mse << " psnr=" << p;
        }
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spike camera simulation, stability verification, and reconstruction"};
    app.require_subcommand(1);

    // simulate
    std::string scene = "constant", sim_out = default_out_dir();
    double q = 0.3, q2 = 0.6, wedge_angle = 0.8;
    int bar_width = 8, bar_period = 8, wedge_period = 256, switch_frame = 0;
    int width = 64, height = 64, frames = 256;
    double threshold = 1.0, noise_flip = 0.0, noise_jitter = 0.0;
    uint32_t fps = kDefaultFps;
    uint64_t seed = 0;
    bool random_phase = false, refs = true;
    auto* sim = app.add_subcommand("simulate", "generate a spike volume from a scene");
    sim->add_option("--scene", scene, "constant | bar | wedge | step")->required();
    sim->add_option("--q", q, "accumulation rate (background rate for bar/wedge)");
    sim->add_option("--q2", q2, "foreground / after-switch rate");
    sim->add_option("--bar-width", bar_width);
    sim->add_option("--bar-period", bar_period, "frames per pixel of bar motion");
    sim->add_option("--wedge-angle", wedge_angle);
    sim->add_option("--wedge-period", wedge_period);
    sim->add_option("--switch-frame", switch_frame);
    sim->add_option("--width", width);
    sim->add_option("--height", height);
    sim->add_option("--frames", frames)->required();
    sim->add_option("--threshold", threshold);
    sim->add_option("--fps", fps);
    sim->add_option("--noise-flip", noise_flip);
    sim->add_option("--noise-jitter", noise_jitter);
    sim->add_option("--seed", seed);
    sim->add_flag("--random-phase", random_phase);
    sim->add_flag("!--no-refs", refs, "skip ground-truth reference images");
    sim->add_option("--out", sim_out, "output directory");

    // reconstruct
    InputOpts rec_in;
    std::string rec_method, rec_out = default_out_dir(), rec_fmt = "pgm";
    int rec_window = 32, rec_workers = 0;
    bool emit_records = false;
    auto* rec = app.add_subcommand("reconstruct", "reconstruct per-frame images");
    add_input_flags(rec, rec_in);
    rec->add_option("--method", rec_method, "fsr | ssr | tfi | tfp[-N]")->required();
    rec->add_option("--window", rec_window, "tfp window length");
    rec->add_option("--out", rec_out, "output directory");
    rec->add_flag("--emit-records", emit_records, "write encoded records instead of frames");
    rec->add_option("--format", rec_fmt, "pgm | png");
    rec->add_option("--workers", rec_workers, "worker threads (0 = hardware)");

    // verify-stability
    int vs_count = 200, vs_length = 2048, vs_depth = 8;
    double vs_qmin = 0.005, vs_qmax = 1.0;
    std::string vs_file;
    auto* vs = app.add_subcommand("verify-stability",
                                  "check the stability properties on a rate sweep or file");
    vs->add_option("--count", vs_count);
    vs->add_option("--q-min", vs_qmin);
    vs->add_option("--q-max", vs_qmax);
    vs->add_option("--length", vs_length);
    vs->add_option("--depth", vs_depth);
    vs->add_option("--in", vs_file, "SPK1 file whose pixel streams are judged instead");

    // bench
    InputOpts bench_in;
    std::string bench_methods = "fsr,ssr,tfi,tfp-32";
    std::string bench_workers = "1";
    int bench_repeats = 5;
    auto* bn = app.add_subcommand("bench", "measure reconstruction throughput");
    add_input_flags(bn, bench_in);
    bn->add_option("--methods", bench_methods);
    bn->add_option("--repeats", bench_repeats);
    bn->add_option("--workers", bench_workers, "comma-separated worker counts");

    // compare
    InputOpts cmp_in;
    std::string cmp_methods = "fsr,ssr,tfi,tfp-32", cmp_ref;
    bool cmp_psnr = false;
    int cmp_warmup = 64, cmp_workers = 0;
    auto* cmp = app.add_subcommand("compare", "quality metrics per method");
    add_input_flags(cmp, cmp_in);
    cmp->add_option("--methods", cmp_methods);
    cmp->add_option("--ref", cmp_ref, "directory of reference frames");
    cmp->add_flag("--psnr", cmp_psnr, "require PSNR against --ref");
    cmp->add_option("--warmup", cmp_warmup, "frames skipped before measuring");
    cmp->add_option("--workers", cmp_workers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(scene, q, q2, bar_width, bar_period, wedge_angle, wedge_period,
                                switch_frame, width, height, frames, threshold, fps, noise_flip,
                                noise_jitter, seed, random_phase, refs, sim_out);
        }
        if (rec->parsed()) {
            return cmd_reconstruct(rec_in, rec_method, rec_window, rec_out, emit_records,
                                   rec_fmt, rec_workers);
        }
        if (vs->parsed()) {
            return cmd_verify_stability(vs_count, vs_qmin, vs_qmax, vs_length, vs_depth, vs_file);
        }
        if (bn->parsed()) {
            return cmd_bench(bench_in, bench_methods, bench_repeats, bench_workers);
        }
        if (cmp->parsed()) {
            return cmd_compare(cmp_in, cmp_methods, cmp_ref, cmp_psnr, cmp_warmup, cmp_workers);
        }
    } catch (const io_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerifyFail;
    }
    return 0;
}
