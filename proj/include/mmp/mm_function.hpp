#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "box.hpp"
#include "error.hpp"

namespace mmp {

/// Mixed-monotonic function F(x, y): nondecreasing in x, nonincreasing in y.
///
/// The objective it represents is the diagonal f(x) = F(x, x), and F(s, r)
/// bounds f from above on the box [r, s]. Monotonicity is trusted from the
/// constructing code (see calculus.hpp) and can be spot-checked with
/// check_mm_property. Instances are immutable and cheap to copy.
class MMFunction {
public:
    using Fn = std::function<double(std::span<const double>, std::span<const double>)>;

    MMFunction(std::size_t dimension, Fn fn)
        : dim_(dimension), fn_(std::make_shared<const Fn>(std::move(fn))) {
        if (dim_ == 0) throw Error(Errc::DimensionMismatch, "MMFunction dimension must be at least 1");
    }

    std::size_t dimension() const noexcept { return dim_; }

    /// Evaluates F(x, y). A NaN result is an EvaluationError, never a value.
    double eval(std::span<const double> x, std::span<const double> y) const {
        if (x.size() != dim_ || y.size() != dim_)
            throw Error(Errc::DimensionMismatch, "MMFunction of dimension " + std::to_string(dim_) +
                                                     " evaluated at (" + std::to_string(x.size()) + ", " +
                                                     std::to_string(y.size()) + ")");
        const double v = (*fn_)(x, y);
        if (std::isnan(v)) throw Error(Errc::EvaluationError, "MMFunction returned NaN");
        return v;
    }

    double operator()(std::span<const double> x, std::span<const double> y) const { return eval(x, y); }

    double diagonal(std::span<const double> x) const { return eval(x, x); }

private:
    std::size_t dim_;
    std::shared_ptr<const Fn> fn_;
};

/// Constraint G(x, x) <= 0 with G mixed-monotonic.
///
/// `monotone_split` holds the index set I (0-based, sorted) when
/// G(sum_{j in I} x_j e_j, sum_{k not in I} y_k e_k) = G(x, y): then x only
/// enters through the coordinates in I and y only through the rest.
struct MMConstraint {
    MMFunction g;
    std::optional<std::vector<std::size_t>> monotone_split;

    double eval(std::span<const double> x, std::span<const double> y) const { return g.eval(x, y); }
    double at(std::span<const double> x) const { return g.eval(x, x); }
};

struct MMPropertyReport {
    std::size_t violations = 0;
    double worst_gap = 0.0;
};

namespace detail {

/// Uniform point in the box; with probability 1/8 per coordinate it snaps to a corner.
inline Vec sample_point(const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec x(box.dimension());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = unit(rng);
        const double t = u < 0.0625 ? 0.0 : (u > 0.9375 ? 1.0 : unit(rng));
        x[i] = box.lower[i] + t * (box.upper[i] - box.lower[i]);
    }
    return x;
}

/// Point p' >= p inside the box. Half of the time only one coordinate moves.
inline Vec sample_above(const Vec& p, const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vec q = p;
    if (unit(rng) < 0.5) {
        std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
        const std::size_t i = pick(rng);
        q[i] = p[i] + unit(rng) * (box.upper[i] - p[i]);
    } else {
        for (std::size_t i = 0; i < p.size(); ++i) q[i] = p[i] + unit(rng) * (box.upper[i] - p[i]);
    }
    return q;
}

} // namespace detail

/// Sampled check of the mixed-monotonic inequalities on `box`.
///
/// Each sample draws one ordered pair x <= x' (with y fixed) and one ordered
/// pair y <= y' (with x fixed). A violation is F(x,y) > F(x',y) + 1e-12 or
/// F(x,y') > F(x,y) + 1e-12; `worst_gap` is the largest such excess.
inline MMPropertyReport check_mm_property(const MMFunction& f, const Box& box, std::size_t samples,
                                          std::uint64_t seed) {
    if (f.dimension() != box.dimension())
        throw Error(Errc::DimensionMismatch, "function and box dimensions differ");
    constexpr double tol = 1e-12;
    MMPropertyReport report;
    std::mt19937_64 rng(seed);
    auto record = [&](double should_be_small, double should_be_large) {
        if (should_be_small > should_be_large + tol) {
            ++report.violations;
            const double gap = should_be_small - should_be_large;
            report.worst_gap = std::max(report.worst_gap, std::isfinite(gap) ? gap : HUGE_VAL);
        }
    };
    for (std::size_t n = 0; n < samples; ++n) {
        const Vec x = detail::sample_point(box, rng);
        const Vec y = detail::sample_point(box, rng);
        const Vec x_up = detail::sample_above(x, box, rng);
        const Vec y_up = detail::sample_above(y, box, rng);
        const double fxy = f.eval(x, y);
        record(fxy, f.eval(x_up, y));
        record(f.eval(x, y_up), fxy);
    }
    return report;
}

} // namespace mmp
