#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "box.hpp"
#include "error.hpp"
#include "mm_function.hpp"

namespace mmp {

enum class VerdictKind { FullyFeasible, Infeasible, Unknown, FeasibleWithWitness };

constexpr std::string_view to_string(VerdictKind k) noexcept {
    switch (k) {
    case VerdictKind::FullyFeasible: return "FullyFeasible";
    case VerdictKind::Infeasible: return "Infeasible";
    case VerdictKind::Unknown: return "Unknown";
    case VerdictKind::FeasibleWithWitness: return "FeasibleWithWitness";
    }
    return "?";
}

/// Outcome of a box-level feasibility test. FullyFeasible means every point
/// of the box is feasible; FeasibleWithWitness carries one feasible point.
struct FeasibilityVerdict {
    VerdictKind kind = VerdictKind::Unknown;
    std::optional<Vec> witness;

    static FeasibilityVerdict fully_feasible() { return {VerdictKind::FullyFeasible, std::nullopt}; }
    static FeasibilityVerdict infeasible() { return {VerdictKind::Infeasible, std::nullopt}; }
    static FeasibilityVerdict unknown() { return {VerdictKind::Unknown, std::nullopt}; }
    static FeasibilityVerdict with_witness(Vec w) { return {VerdictKind::FeasibleWithWitness, std::move(w)}; }

    bool is_infeasible() const noexcept { return kind == VerdictKind::Infeasible; }
    bool is_feasible() const noexcept {
        return kind == VerdictKind::FullyFeasible || kind == VerdictKind::FeasibleWithWitness;
    }
};

/// Plain function of one point, used for normal (g(x) <= 0) and conormal
/// (h(x) >= 0) descriptions with nondecreasing g, h.
using PointFn = std::function<double(std::span<const double>)>;

/// Constraint values at the two box corners: G_i(r, s) and G_i(s, r).
struct CornerValues {
    std::vector<double> at_lower_upper;
    std::vector<double> at_upper_lower;

    static CornerValues compute(const Box& box, const std::vector<MMConstraint>& constraints) {
        CornerValues cv;
        cv.at_lower_upper.reserve(constraints.size());
        cv.at_upper_lower.reserve(constraints.size());
        for (const auto& c : constraints) {
            if (c.g.dimension() != box.dimension())
                throw Error(Errc::DimensionMismatch, "constraint dimension differs from box");
            cv.at_lower_upper.push_back(c.eval(box.lower, box.upper));
            cv.at_upper_lower.push_back(c.eval(box.upper, box.lower));
        }
        return cv;
    }
};

inline FeasibilityVerdict mm_sufficient_test(const CornerValues& cv) {
    for (double v : cv.at_lower_upper)
        if (v > 0.0) return FeasibilityVerdict::infeasible();
    for (double v : cv.at_upper_lower)
        if (v > 0.0) return FeasibilityVerdict::unknown();
    return FeasibilityVerdict::fully_feasible();
}

/// FullyFeasible if G_i(s, r) <= 0 for all i, Infeasible if some G_i(r, s) > 0,
/// Unknown otherwise.
inline FeasibilityVerdict mm_sufficient_test(const Box& box, const std::vector<MMConstraint>& constraints) {
    return mm_sufficient_test(CornerValues::compute(box, constraints));
}

/// The index set shared by all constraints, or nullopt if some constraint has
/// none or they disagree.
inline std::optional<std::vector<std::size_t>> shared_monotone_split(const std::vector<MMConstraint>& constraints) {
    if (constraints.empty()) return std::vector<std::size_t>{};
    if (!constraints.front().monotone_split) return std::nullopt;
    const auto& first = *constraints.front().monotone_split;
    for (const auto& c : constraints)
        if (!c.monotone_split || *c.monotone_split != first) return std::nullopt;
    return first;
}

/// Point with coordinates in I taken from `lower`, the rest from `upper`.
inline Vec split_witness(const Box& box, const std::vector<std::size_t>& split) {
    Vec xi = box.upper;
    for (std::size_t j : split) xi[j] = box.lower[j];
    return xi;
}

/// Conclusive test for constraints sharing a monotone split I: the box meets
/// D iff G_i(r, s) <= 0 for all i, with witness xi = r on I and s on I^c.
inline FeasibilityVerdict mm_conclusive_test(const Box& box, const std::vector<MMConstraint>& constraints) {
    const auto split = shared_monotone_split(constraints);
    if (!split) throw Error(Errc::MissingMonotoneSplit, "constraints do not share a monotone split");
    for (const auto& c : constraints) {
        if (c.g.dimension() != box.dimension())
            throw Error(Errc::DimensionMismatch, "constraint dimension differs from box");
        if (c.eval(box.lower, box.upper) > 0.0) return FeasibilityVerdict::infeasible();
    }
    return FeasibilityVerdict::with_witness(split_witness(box, *split));
}

/// Normal set {x : g_i(x) <= 0} with nondecreasing g_i: witness r iff g_i(r) <= 0.
inline FeasibilityVerdict normal_set_test(const Box& box, const std::vector<PointFn>& g) {
    for (const auto& gi : g)
        if (gi(box.lower) > 0.0) return FeasibilityVerdict::infeasible();
    return FeasibilityVerdict::with_witness(box.lower);
}

/// Conormal set {x : h_i(x) >= 0} with nondecreasing h_i: witness s iff h_i(s) >= 0.
inline FeasibilityVerdict conormal_set_test(const Box& box, const std::vector<PointFn>& h) {
    for (const auto& hi : h)
        if (hi(box.upper) < 0.0) return FeasibilityVerdict::infeasible();
    return FeasibilityVerdict::with_witness(box.upper);
}

/// Sampled check that `c` satisfies the separability identity for index set
/// `split` on `box`; returns the number of samples where it fails by more than 1e-12.
inline std::size_t check_monotone_split(const MMConstraint& c, const std::vector<std::size_t>& split, const Box& box,
                                        std::size_t samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<bool> in_split(box.dimension(), false);
    for (std::size_t j : split) in_split.at(j) = true;
    std::size_t failures = 0;
    for (std::size_t n = 0; n < samples; ++n) {
        const Vec x = detail::sample_point(box, rng);
        const Vec y = detail::sample_point(box, rng);
        Vec xs(box.dimension(), 0.0), ys(box.dimension(), 0.0);
        for (std::size_t i = 0; i < box.dimension(); ++i) (in_split[i] ? xs : ys)[i] = (in_split[i] ? x : y)[i];
        const double a = c.eval(xs, ys);
        const double b = c.eval(x, y);
        if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(b))) ++failures;
    }
    return failures;
}

} // namespace mmp
