#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "../box.hpp"
#include "../calculus.hpp"
#include "../error.hpp"
#include "../mm_function.hpp"
#include "../problem.hpp"

namespace mmp::problems {

/// K-user interference channel, interference treated as noise:
/// r_k = log2(1 + alpha_k p_k / (sigma2 + sum_j beta_kj p_j)).
/// beta_kk models self-interference and may be nonzero.
struct InterferenceNetwork {
    std::size_t K = 0;
    Vec alpha;
    std::vector<Vec> beta;
    double sigma2 = 0.01;
    Vec P;
    Vec w;
    Vec rmin;

    void validate() const {
        auto fail = [](const std::string& what) { throw Error(Errc::InvalidNetwork, what); };
        if (K == 0) fail("K must be at least 1");
        if (alpha.size() != K || P.size() != K || w.size() != K || rmin.size() != K || beta.size() != K)
            fail("vector lengths must equal K");
        for (const auto& row : beta)
            if (row.size() != K) fail("beta must be K x K");
        if (!(sigma2 > 0.0)) fail("sigma2 must be positive");
        for (std::size_t k = 0; k < K; ++k) {
            if (!(alpha[k] > 0.0)) fail("alpha must be positive");
            if (!(P[k] > 0.0)) fail("power caps must be positive");
            if (!(w[k] >= 0.0)) fail("weights must be nonnegative");
            if (!(rmin[k] >= 0.0)) fail("minimum rates must be nonnegative");
            for (double b : beta[k])
                if (!(b >= 0.0)) fail("beta entries must be nonnegative");
        }
    }

    Box power_box() const { return make_box(Vec(K, 0.0), P); }
};

enum class RateRepresentation { mmp, dm };

constexpr std::string_view to_string(RateRepresentation r) noexcept { return r == RateRepresentation::mmp ? "mmp" : "dm"; }

/// SINR of user k with the own power (signal and self-interference) taken
/// from x and the other users' powers from y.
inline MMFunction sinr_mm(const InterferenceNetwork& net, std::size_t k) {
    return mm_leaf(net.K, [k, alpha = net.alpha[k], row = net.beta[k], sigma2 = net.sigma2](std::span<const double> x,
                                                                                           std::span<const double> y) {
        double interference = sigma2 + row[k] * x[k];
        for (std::size_t j = 0; j < row.size(); ++j)
            if (j != k) interference += row[j] * y[j];
        return alpha * x[k] / interference;
    });
}

/// R_k(x, y) = log2(1 + SINR_k(x, y)).
inline MMFunction rate_mm(const InterferenceNetwork& net, std::size_t k) {
    return mm_compose_nondecreasing(maps::log2_1p(), sinr_mm(net, k));
}

/// Difference-of-logs rate: every power in the first log is bound to x,
/// every power in the second log to y.
inline MMFunction rate_dm(const InterferenceNetwork& net, std::size_t k) {
    const std::size_t K = net.K;
    auto received = [K, k, alpha = net.alpha[k], row = net.beta[k], sigma2 = net.sigma2](std::span<const double> x,
                                                                                          std::span<const double>) {
        double acc = sigma2 + alpha * x[k];
        for (std::size_t j = 0; j < K; ++j) acc += row[j] * x[j];
        return std::log2(acc);
    };
    auto interference = [K, row = net.beta[k], sigma2 = net.sigma2](std::span<const double> x, std::span<const double>) {
        double acc = sigma2;
        for (std::size_t j = 0; j < K; ++j) acc += row[j] * x[j];
        return std::log2(acc);
    };
    return mm_sum({mm_leaf(K, received), mm_compose_nonincreasing(maps::negate(), mm_leaf(K, interference))});
}

inline MMFunction rate(const InterferenceNetwork& net, std::size_t k, RateRepresentation repr) {
    return repr == RateRepresentation::mmp ? rate_mm(net, k) : rate_dm(net, k);
}

inline std::vector<MMFunction> rates(const InterferenceNetwork& net, RateRepresentation repr) {
    std::vector<MMFunction> out;
    out.reserve(net.K);
    for (std::size_t k = 0; k < net.K; ++k) out.push_back(rate(net, k, repr));
    return out;
}

/// Weighted sum rate sum_k w_k R_k(x, y).
inline MMFunction wsr_objective(const InterferenceNetwork& net, RateRepresentation repr) {
    net.validate();
    return mm_weighted_sum(net.w, rates(net, repr));
}

/// G_k(x, y) = rmin_k - R_k(y, x).
inline std::vector<MMConstraint> wsr_rate_constraints(const InterferenceNetwork& net, RateRepresentation repr) {
    net.validate();
    std::vector<MMConstraint> out;
    out.reserve(net.K);
    for (std::size_t k = 0; k < net.K; ++k)
        out.push_back({mm_compose_nonincreasing(maps::subtract_from(net.rmin[k]), rate(net, k, repr)), std::nullopt});
    return out;
}

/// Weighted sum rate maximization over [0, P] with minimum-rate constraints.
/// Rates are nonnegative, so only users with rmin_k > 0 get a constraint;
/// without any the feasible set is the power box itself. (The difference-of-logs
/// rate can be negative at mixed corners, so a vacuous constraint would still
/// block the sufficient test.)
inline ProblemInstance wsr_problem(const InterferenceNetwork& net, RateRepresentation repr) {
    net.validate();
    auto all = wsr_rate_constraints(net, repr);
    std::vector<MMConstraint> active;
    for (std::size_t k = 0; k < net.K; ++k)
        if (net.rmin[k] > 0.0) active.push_back(std::move(all[k]));
    const bool constrained = !active.empty();
    return ProblemInstance{
        .objective = wsr_objective(net, repr),
        .constraints = std::move(active),
        .initial_box = net.power_box(),
        .feasibility_mode = constrained ? FeasibilityMode::mm_sufficient_only : FeasibilityMode::normal,
        .normal = {},
        .conormal = {},
        .oracle = {},
        .incumbent_hook = {},
    };
}

/// U_dm(box) - U_mmp(box) for the weighted sum rate objective.
inline double bound_gap_mmp_vs_dm(const InterferenceNetwork& net, const Box& box) {
    const auto mm = wsr_objective(net, RateRepresentation::mmp);
    const auto dm = wsr_objective(net, RateRepresentation::dm);
    return dm.eval(box.upper, box.lower) - mm.eval(box.upper, box.lower);
}

/// Random network with alpha_k = |a_k|^2, beta_kj = |b_kj|^2 (j != k) for
/// a, b ~ CN(0, 1), and defaults sigma2 = 0.01, P = w = 1, beta_kk = 0, rmin = 0.
inline InterferenceNetwork generate_channels(std::size_t K, std::uint64_t seed) {
    if (K == 0) throw Error(Errc::InvalidNetwork, "K must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> component(0.0, std::sqrt(0.5));
    auto gain = [&] {
        const double re = component(rng);
        const double im = component(rng);
        return re * re + im * im;
    };
    InterferenceNetwork net;
    net.K = K;
    net.alpha.resize(K);
    for (auto& a : net.alpha) a = gain();
    net.beta.assign(K, Vec(K, 0.0));
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) net.beta[k][j] = gain();
    net.sigma2 = 0.01;
    net.P.assign(K, 1.0);
    net.w.assign(K, 1.0);
    net.rmin.assign(K, 0.0);
    return net;
}

} // namespace mmp::problems
