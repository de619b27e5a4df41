#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>

#include "spikecam/core.hpp"

namespace spikecam {

// Location of the shallowest zero-order violation in the interval tree.
// `path` is the '-'/'+' firing-choice sequence leading to the violating
// sequence ('-' = smaller firing value); empty for a violation in S1.
struct ViolationInfo {
    std::string path;
    int depth = 0;     // 1 = S1
    size_t index = 0;  // first offending element in that sequence
};

struct StabilityReport {
    int verified_order = 0;  // depth to which stability held
    bool absolute = false;   // every branch emptied (or went constant) before a violation
    std::optional<ViolationInfo> first_violation;
};

enum class FiringChoice { smaller, larger };

// Derived integrator parameters for the interval stream S1 of a
// constant-rate stream. The larger firing choice yields a sign-reflected
// (negative rate / negative threshold) integrator.
struct Lemma2Params {
    double q1 = 0.0;
    double m1_threshold = 0.0;
    FiringChoice firing_choice = FiringChoice::smaller;
    long derived_firing_value = 0;
};

// Gaps between consecutive occurrences of `firing` in `values`; empty when
// it occurs fewer than twice.
IntervalStream interval_stream(std::span<const int> values, int firing);
IntervalStream interval_stream(const SpikeLikeStream& stream);

// At most two distinct values, differing by exactly 1 when there are two.
bool is_zero_order_stable(std::span<const int> values);

// Explores the full binary tree of interval streams up to max_depth,
// branching on both firing choices wherever a sequence has two distinct
// values ('-' explored first). A constant sequence is an absolutely stable
// leaf: every derived stream of it is constant again and shrinks to empty.
StabilityReport stability_order(const SpikeLikeStream& stream, int max_depth);

// The only attainable readout intervals for a constant rate: floor(T0*)
// and floor(T0*)+1 with T0* = threshold/q0, collapsing to T0* alone when
// it is an exact integer.
std::pair<long, long> lemma1_interval_bounds(double q0, double threshold);

Lemma2Params lemma2_params(double q0, double threshold, FiringChoice choice);

// Simulates a constant-rate stream and checks both derived-level interval
// predictions (S1 values against lemma1_interval_bounds, S2 values against
// the bounds of the derived integrator).
bool verify_lemma2(double q0, double threshold, int length);

}  // namespace spikecam
