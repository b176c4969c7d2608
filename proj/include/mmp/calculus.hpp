#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "box.hpp"
#include "error.hpp"
#include "mm_function.hpp"

// Combinators that build new mixed-monotonic functions from existing ones.
// Every combinator preserves the MM property of its inputs, so problem
// constructors only have to get the leaves right.

namespace mmp {

enum class Monotonicity { nondecreasing, nonincreasing };

/// Scalar map with a declared direction of monotonicity.
struct ScalarMap {
    std::function<double(double)> fn;
    Monotonicity direction;
    std::string name;

    double operator()(double v) const { return fn(v); }
};

namespace maps {

inline ScalarMap identity() {
    return {[](double v) { return v; }, Monotonicity::nondecreasing, "identity"};
}

/// log2(1 + v); -inf at v = -1, undefined below.
inline ScalarMap log2_1p() {
    return {[](double v) {
                if (v < -1.0) return std::numeric_limits<double>::quiet_NaN();
                return std::log2(1.0 + v);
            },
            Monotonicity::nondecreasing, "log2(1+v)"};
}

/// Natural log; ln(0) = -inf is admitted as the limit value.
inline ScalarMap ln() {
    return {[](double v) {
                if (v < 0.0) return std::numeric_limits<double>::quiet_NaN();
                return std::log(v);
            },
            Monotonicity::nondecreasing, "ln"};
}

inline ScalarMap exp() {
    return {[](double v) { return std::exp(v); }, Monotonicity::nondecreasing, "exp"};
}

inline ScalarMap negate() {
    return {[](double v) { return -v; }, Monotonicity::nonincreasing, "negate"};
}

/// offset - v
inline ScalarMap subtract_from(double offset) {
    return {[offset](double v) { return offset - v; }, Monotonicity::nonincreasing,
            "subtract_from(" + std::to_string(offset) + ")"};
}

/// 1 / v for v > 0.
inline ScalarMap reciprocal() {
    return {[](double v) {
                if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
                return 1.0 / v;
            },
            Monotonicity::nonincreasing, "reciprocal"};
}

/// c * v; direction follows the sign of c.
inline ScalarMap scale(double c) {
    return {[c](double v) { return c * v; }, c >= 0.0 ? Monotonicity::nondecreasing : Monotonicity::nonincreasing,
            "scale(" + std::to_string(c) + ")"};
}

inline ScalarMap constant(double c, Monotonicity declared = Monotonicity::nonincreasing) {
    return {[c](double) { return c; }, declared, "constant(" + std::to_string(c) + ")"};
}

} // namespace maps

namespace detail {

inline void require_same_dimension(const std::vector<MMFunction>& parts, const char* who) {
    if (parts.empty()) throw Error(Errc::EmptyList, std::string(who) + " needs at least one part");
    const std::size_t n = parts.front().dimension();
    for (const auto& p : parts)
        if (p.dimension() != n) throw Error(Errc::DimensionMismatch, std::string(who) + ": parts differ in dimension");
}

inline double apply_map(const ScalarMap& map, double v) {
    const double out = map(v);
    if (std::isnan(out))
        throw Error(Errc::DomainError, map.name + " undefined at " + std::to_string(v));
    return out;
}

/// Checks the declared direction of `map` on 100 values of `inner` sampled over `probe`.
inline void spot_check_direction(const ScalarMap& map, const MMFunction& inner, const Box& probe) {
    std::mt19937_64 rng(0x5eed);
    std::vector<double> values;
    values.reserve(100);
    for (int n = 0; n < 100; ++n) {
        const Vec x = sample_point(probe, rng);
        const Vec y = sample_point(probe, rng);
        values.push_back(inner.eval(x, y));
    }
    std::sort(values.begin(), values.end());
    double prev = apply_map(map, values.front());
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double cur = apply_map(map, values[i]);
        const double slack = 1e-12 * std::max(1.0, std::abs(prev));
        const bool bad = map.direction == Monotonicity::nondecreasing ? cur < prev - slack : cur > prev + slack;
        if (bad) throw Error(Errc::NonMonotoneMap, map.name + " violates its declared direction");
        prev = cur;
    }
}

} // namespace detail

/// Leaf constructor; the caller vouches for the MM property.
inline MMFunction mm_leaf(std::size_t dimension, MMFunction::Fn fn) { return MMFunction(dimension, std::move(fn)); }

inline MMFunction mm_constant(std::size_t dimension, double c) {
    return MMFunction(dimension, [c](std::span<const double>, std::span<const double>) { return c; });
}

/// scale * x_i; nondecreasing in x for scale >= 0.
inline MMFunction mm_coordinate(std::size_t dimension, std::size_t i, double scale = 1.0) {
    if (i >= dimension) throw Error(Errc::DimensionMismatch, "coordinate index out of range");
    if (scale < 0.0) throw Error(Errc::NegativeWeight, "mm_coordinate scale must be nonnegative");
    return MMFunction(dimension, [i, scale](std::span<const double> x, std::span<const double>) { return scale * x[i]; });
}

/// offset + sum_i weights[i] * x_i with nonnegative weights (y unused).
inline MMFunction mm_affine_x(std::vector<double> weights, double offset) {
    for (double w : weights)
        if (w < 0.0) throw Error(Errc::NegativeWeight, "mm_affine_x weights must be nonnegative");
    const std::size_t n = weights.size();
    return MMFunction(n, [weights = std::move(weights), offset](std::span<const double> x, std::span<const double>) {
        double acc = offset;
        for (std::size_t i = 0; i < weights.size(); ++i) acc += weights[i] * x[i];
        return acc;
    });
}

inline MMFunction mm_sum(std::vector<MMFunction> parts) {
    detail::require_same_dimension(parts, "mm_sum");
    const std::size_t n = parts.front().dimension();
    return MMFunction(n, [parts = std::move(parts)](std::span<const double> x, std::span<const double> y) {
        double acc = 0.0;
        for (const auto& p : parts) acc += p.eval(x, y);
        return acc;
    });
}

inline MMFunction mm_weighted_sum(std::vector<double> weights, std::vector<MMFunction> parts) {
    detail::require_same_dimension(parts, "mm_weighted_sum");
    if (weights.size() != parts.size())
        throw Error(Errc::DimensionMismatch, "mm_weighted_sum: weights and parts differ in length");
    for (double w : weights)
        if (!(w >= 0.0)) throw Error(Errc::NegativeWeight, "mm_weighted_sum weights must be nonnegative");
    const std::size_t n = parts.front().dimension();
    return MMFunction(n, [weights = std::move(weights), parts = std::move(parts)](std::span<const double> x,
                                                                                    std::span<const double> y) {
        double acc = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (weights[i] != 0.0) acc += weights[i] * parts[i].eval(x, y);
        return acc;
    });
}

inline MMFunction mm_min(std::vector<MMFunction> parts) {
    detail::require_same_dimension(parts, "mm_min");
    const std::size_t n = parts.front().dimension();
    return MMFunction(n, [parts = std::move(parts)](std::span<const double> x, std::span<const double> y) {
        double acc = std::numeric_limits<double>::infinity();
        for (const auto& p : parts) acc = std::min(acc, p.eval(x, y));
        return acc;
    });
}

inline MMFunction mm_max(std::vector<MMFunction> parts) {
    detail::require_same_dimension(parts, "mm_max");
    const std::size_t n = parts.front().dimension();
    return MMFunction(n, [parts = std::move(parts)](std::span<const double> x, std::span<const double> y) {
        double acc = -std::numeric_limits<double>::infinity();
        for (const auto& p : parts) acc = std::max(acc, p.eval(x, y));
        return acc;
    });
}

/// (x, y) -> g(F(x, y)) for nondecreasing g. With `probe`, g's direction is
/// spot-checked on values of F over that box.
inline MMFunction mm_compose_nondecreasing(ScalarMap g, MMFunction f, const std::optional<Box>& probe = std::nullopt) {
    if (g.direction != Monotonicity::nondecreasing)
        throw Error(Errc::NonMonotoneMap, g.name + " is not declared nondecreasing");
    if (probe) detail::spot_check_direction(g, f, *probe);
    const std::size_t n = f.dimension();
    return MMFunction(n, [g = std::move(g), f = std::move(f)](std::span<const double> x, std::span<const double> y) {
        return detail::apply_map(g, f.eval(x, y));
    });
}

/// (x, y) -> h(F(y, x)) for nonincreasing h; the arguments are swapped into F.
inline MMFunction mm_compose_nonincreasing(ScalarMap h, MMFunction f, const std::optional<Box>& probe = std::nullopt) {
    if (h.direction != Monotonicity::nonincreasing)
        throw Error(Errc::NonMonotoneMap, h.name + " is not declared nonincreasing");
    if (probe) detail::spot_check_direction(h, f, *probe);
    const std::size_t n = f.dimension();
    return MMFunction(n, [h = std::move(h), f = std::move(f)](std::span<const double> x, std::span<const double> y) {
        return detail::apply_map(h, f.eval(y, x));
    });
}

/// Product of factors that are nonnegative on `domain`. Nonnegativity is
/// sampled at 1000 points on construction and enforced at every evaluation.
inline MMFunction mm_product(std::vector<MMFunction> parts, const Box& domain) {
    detail::require_same_dimension(parts, "mm_product");
    const std::size_t n = parts.front().dimension();
    if (domain.dimension() != n) throw Error(Errc::DimensionMismatch, "mm_product: domain box dimension");
    constexpr double tol = -1e-12;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    for (int s = 0; s < 1000; ++s) {
        const Vec x = detail::sample_point(domain, rng);
        const Vec y = detail::sample_point(domain, rng);
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (parts[i].eval(x, y) < tol)
                throw Error(Errc::NegativityDetected, "mm_product factor " + std::to_string(i) + " negative on domain");
    }
    return MMFunction(n, [parts = std::move(parts)](std::span<const double> x, std::span<const double> y) {
        double acc = 1.0;
        for (const auto& p : parts) {
            const double v = p.eval(x, y);
            if (v < tol) throw Error(Errc::NegativityDetected, "mm_product factor evaluated to " + std::to_string(v));
            acc *= std::max(v, 0.0);
        }
        return acc;
    });
}

/// numerator(x, y) / q(y), where `denominator` is an MM function Q with
/// q(y) = Q(y, x); for Q depending on its first argument only this is the
/// plain nondecreasing denominator evaluated at y.
inline MMFunction mm_ratio(MMFunction numerator, MMFunction denominator) {
    if (numerator.dimension() != denominator.dimension())
        throw Error(Errc::DimensionMismatch, "mm_ratio: numerator and denominator differ in dimension");
    const std::size_t n = numerator.dimension();
    return MMFunction(n, [num = std::move(numerator), den = std::move(denominator)](std::span<const double> x,
                                                                                   std::span<const double> y) {
        const double q = den.eval(y, x);
        if (!(q > 0.0)) throw Error(Errc::NonpositiveDenominator, "mm_ratio denominator " + std::to_string(q));
        const double p = num.eval(x, y);
        if (p < -1e-12) throw Error(Errc::NegativityDetected, "mm_ratio numerator " + std::to_string(p));
        return std::max(p, 0.0) / q;
    });
}

} // namespace mmp
