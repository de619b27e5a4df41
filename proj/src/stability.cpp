#include "spikecam/stability.hpp"

#include <algorithm>
#include <cmath>

#include "spikecam/simulator.hpp"

namespace spikecam {

namespace {

constexpr double kFracTolerance = 1e-9;

// Fractional part of T0* = threshold/q0, snapped to 0 when within
// tolerance of an integer boundary.
double interval_fraction(double q0, double threshold, long* floor_out) {
    if (q0 <= 0.0) throw std::invalid_argument("interval bounds: q0 must be > 0");
    if (q0 > threshold) throw std::invalid_argument("interval bounds: q0 must be <= threshold");
    double t_star = threshold / q0;
    double fl = std::floor(t_star);
    double b = t_star - fl;
    if (b > 1.0 - kFracTolerance) {
        fl += 1.0;
        b = 0.0;
    } else if (b < kFracTolerance) {
        b = 0.0;
    }
    *floor_out = static_cast<long>(fl);
    return b;
}

struct TreeState {
    int max_depth;
    int deepest_ok = 0;
    bool truncated = false;
    std::optional<ViolationInfo> violation;
};

// Scans for the first element whose inclusion breaks the zero-order rule;
// npos when the sequence is stable.
size_t first_violation_index(std::span<const int> values) {
    bool have_a = false, have_b = false;
    int a = 0, b = 0;
    for (size_t i = 0; i < values.size(); ++i) {
        int v = values[i];
        if (!have_a) {
            a = v;
            have_a = true;
        } else if (v == a || (have_b && v == b)) {
            // seen before
        } else if (!have_b && std::abs(v - a) == 1) {
            b = v;
            have_b = true;
        } else {
            return i;
        }
    }
    return static_cast<size_t>(-1);
}

void explore(std::span<const int> seq, int depth, std::string& path, TreeState& st) {
    if (st.violation && st.violation->depth <= depth) return;
    if (seq.empty()) {
        st.deepest_ok = std::max(st.deepest_ok, depth);
        return;
    }
    size_t bad = first_violation_index(seq);
    if (bad != static_cast<size_t>(-1)) {
        // keep the shallowest violation; DFS '-'-first breaks ties
        if (!st.violation || depth < st.violation->depth) {
            st.violation = ViolationInfo{path, depth, bad};
        }
        return;
    }
    st.deepest_ok = std::max(st.deepest_ok, depth);
    auto [lo, hi] = std::minmax_element(seq.begin(), seq.end());
    if (*lo == *hi) return;  // constant: absolutely stable leaf
    if (depth >= st.max_depth) {
        st.truncated = true;
        return;
    }
    for (char branch : {'-', '+'}) {
        int firing = branch == '-' ? *lo : *hi;
        IntervalStream child = interval_stream(seq, firing);
        path.push_back(branch);
        explore(child.intervals, depth + 1, path, st);
        path.pop_back();
    }
}

}  // namespace

IntervalStream interval_stream(std::span<const int> values, int firing) {
    std::vector<int> gaps;
    long last = -1;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] != firing) continue;
        if (last >= 0) gaps.push_back(static_cast<int>(static_cast<long>(i) - last));
        last = static_cast<long>(i);
    }
    return IntervalStream(std::move(gaps));
}

IntervalStream interval_stream(const SpikeLikeStream& stream) {
    return interval_stream(stream.values, stream.firing_value);
}

bool is_zero_order_stable(std::span<const int> values) {
    return first_violation_index(values) == static_cast<size_t>(-1);
}

StabilityReport stability_order(const SpikeLikeStream& stream, int max_depth) {
    if (max_depth < 1) throw std::invalid_argument("stability_order: max_depth must be >= 1");
    TreeState st{max_depth};
    IntervalStream s1 = interval_stream(stream);
    std::string path;
    explore(s1.intervals, 1, path, st);
    StabilityReport report;
    report.first_violation = st.violation;
    if (st.violation) {
        report.absolute = false;
        report.verified_order = st.violation->depth - 1;
    } else {
        report.absolute = !st.truncated;
        report.verified_order = st.truncated ? max_depth : st.deepest_ok;
    }
    return report;
}

std::pair<long, long> lemma1_interval_bounds(double q0, double threshold) {
    long fl = 0;
    double b = interval_fraction(q0, threshold, &fl);
    if (b == 0.0) return {fl, fl};
    return {fl, fl + 1};
}

Lemma2Params lemma2_params(double q0, double threshold, FiringChoice choice) {
    long fl = 0;
    double b = interval_fraction(q0, threshold, &fl);
    Lemma2Params p;
    p.firing_choice = choice;
    double denom = static_cast<double>(fl) + b;
    if (choice == FiringChoice::smaller) {
        p.q1 = (1.0 - b) * threshold / denom;
        p.m1_threshold = threshold / denom;
        p.derived_firing_value = fl;
    } else {
        if (b == 0.0) {
            throw std::invalid_argument(
                "lemma2_params: larger firing choice needs a non-integer period");
        }
        p.q1 = -b * threshold / denom;
        p.m1_threshold = -threshold / denom;
        p.derived_firing_value = fl + 1;
    }
    return p;
}

bool verify_lemma2(double q0, double threshold, int length) {
    long fl = 0;
    double b = interval_fraction(q0, threshold, &fl);
    std::vector<double> rates(static_cast<size_t>(length), q0);
    SpikeLikeStream s0 = simulate_pixel(rates, threshold);
    IntervalStream s1 = interval_stream(s0);
    auto [lo, hi] = lemma1_interval_bounds(q0, threshold);
    for (int t : s1.intervals) {
        if (t != lo && t != hi) return false;
    }
    if (b == 0.0) return true;  // S1 constant; the derived stream is empty
    Lemma2Params p = lemma2_params(q0, threshold, FiringChoice::smaller);
    auto [lo2, hi2] = lemma1_interval_bounds(std::abs(p.q1), std::abs(p.m1_threshold));
    IntervalStream s2 = interval_stream(s1.intervals, static_cast<int>(lo));
    for (int t : s2.intervals) {
        if (t != lo2 && t != hi2) return false;
    }
    return true;
}

}  // namespace spikecam
