#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"

namespace mmp {

using Vec = std::vector<double>;

/// Hyperrectangle [lower, upper]. `birth` is the iteration index that created it.
struct Box {
    Vec lower;
    Vec upper;
    std::uint64_t birth = 0;

    std::size_t dimension() const noexcept { return lower.size(); }

    double width(std::size_t i) const { return upper[i] - lower[i]; }

    double diameter() const {
        double d = 0.0;
        for (std::size_t i = 0; i < lower.size(); ++i) d = std::max(d, upper[i] - lower[i]);
        return d;
    }

    bool contains(std::span<const double> x, double tol = 0.0) const {
        if (x.size() != lower.size()) return false;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
        return true;
    }

    Vec midpoint() const {
        Vec m(lower.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 * (lower[i] + upper[i]);
        return m;
    }

    friend bool operator==(const Box&, const Box&) = default;
};

inline Box make_box(Vec lower, Vec upper) {
    if (lower.size() != upper.size())
        throw Error(Errc::DimensionMismatch, "corners have dimensions " + std::to_string(lower.size()) +
                                                 " and " + std::to_string(upper.size()));
    if (lower.empty()) throw Error(Errc::DimensionMismatch, "box dimension must be at least 1");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]))
            throw Error(Errc::NonFiniteEntry, "corner entry " + std::to_string(i) + " is not finite");
        if (lower[i] > upper[i])
            throw Error(Errc::CornerOrderViolation, "lower > upper in dimension " + std::to_string(i));
    }
    return Box{std::move(lower), std::move(upper), 0};
}

} // namespace mmp
