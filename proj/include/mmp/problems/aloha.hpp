#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "../box.hpp"
#include "../calculus.hpp"
#include "../error.hpp"
#include "../problem.hpp"

namespace mmp::problems {

/// Slotted ALOHA: user k transmits with probability theta_k and succeeds
/// at rate c_k when no user in interferers[k] transmits in the same slot.
struct AlohaNetwork {
    std::size_t K = 0;
    Vec c;
    std::vector<std::vector<std::size_t>> interferers;
    Vec rmin;

    void validate() const {
        auto fail = [](const std::string& what) { throw Error(Errc::InvalidNetwork, what); };
        if (K == 0) fail("K must be at least 1");
        if (c.size() != K || interferers.size() != K || rmin.size() != K) fail("vector lengths must equal K");
        for (std::size_t k = 0; k < K; ++k) {
            if (!(c[k] > 0.0)) fail("success rates c must be positive");
            if (!(rmin[k] >= 0.0)) fail("minimum rates must be nonnegative");
            for (std::size_t j : interferers[k]) {
                if (j >= K) fail("interferer index out of range");
                if (j == k) fail("a user cannot interfere with itself");
            }
        }
    }
};

/// Lower corner of the search box; keeps the logarithms finite.
inline constexpr double aloha_delta = 1e-9;

inline Box aloha_box(std::size_t K) { return make_box(Vec(K, aloha_delta), Vec(K, 1.0)); }

/// R_k(x, y) = c_k x_k prod_{j in I(k)} (1 - y_j).
inline MMFunction aloha_throughput(const AlohaNetwork& net, std::size_t k) {
    std::vector<MMFunction> factors{mm_coordinate(net.K, k, net.c[k])};
    for (std::size_t j : net.interferers[k])
        factors.push_back(mm_compose_nonincreasing(maps::subtract_from(1.0), mm_coordinate(net.K, j)));
    return mm_product(std::move(factors), aloha_box(net.K));
}

/// Proportional-fair utility sum_k ln R_k(x, y).
inline MMFunction aloha_objective(const AlohaNetwork& net) {
    net.validate();
    std::vector<MMFunction> terms;
    for (std::size_t k = 0; k < net.K; ++k) terms.push_back(mm_compose_nondecreasing(maps::ln(), aloha_throughput(net, k)));
    return mm_sum(std::move(terms));
}

/// G_k(x, y) = rmin_k - R_k(y, x).
inline std::vector<MMConstraint> aloha_constraints(const AlohaNetwork& net) {
    net.validate();
    std::vector<MMConstraint> out;
    for (std::size_t k = 0; k < net.K; ++k)
        out.push_back({mm_compose_nonincreasing(maps::subtract_from(net.rmin[k]), aloha_throughput(net, k)), std::nullopt});
    return out;
}

/// The rate constraints have no shared monotone split, so only the one-sided
/// tests are available.
inline ProblemInstance aloha_problem(const AlohaNetwork& net) {
    return ProblemInstance{
        .objective = aloha_objective(net),
        .constraints = aloha_constraints(net),
        .initial_box = aloha_box(net.K),
        .feasibility_mode = FeasibilityMode::mm_sufficient_only,
        .normal = {},
        .conormal = {},
        .oracle = {},
        .incumbent_hook = {},
    };
}

inline std::vector<std::vector<std::size_t>> full_interference(std::size_t K) {
    std::vector<std::vector<std::size_t>> sets(K);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < K; ++j)
            if (j != k) sets[k].push_back(j);
    return sets;
}

/// Largest common normalized rate r_k / c_k achievable under full
/// interference: max_theta theta (1 - theta)^(K-1) = (K-1)^(K-1) / K^K.
inline double aloha_symmetric_boundary(std::size_t K) {
    if (K == 0) throw Error(Errc::InvalidNetwork, "K must be at least 1");
    const double k = static_cast<double>(K);
    return std::pow(k - 1.0, k - 1.0) / std::pow(k, k);
}

/// Random full-interference network: c_k = log2(1 + |a_k|^2), a_k ~ CN(0, 1),
/// rmin_k = c_k chi_k with chi_k ~ N(chi_mean, chi_sd^2) clamped at 0.
/// Draws near the symmetric boundary may be infeasible.
inline AlohaNetwork generate_aloha(std::size_t K, std::uint64_t seed, double chi_mean, double chi_sd = 0.05) {
    if (K == 0) throw Error(Errc::InvalidNetwork, "K must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> component(0.0, std::sqrt(0.5));
    std::normal_distribution<double> chi(chi_mean, chi_sd);
    AlohaNetwork net;
    net.K = K;
    net.c.resize(K);
    for (auto& ck : net.c) {
        const double re = component(rng);
        const double im = component(rng);
        ck = std::log2(1.0 + re * re + im * im);
    }
    net.rmin.resize(K);
    for (std::size_t k = 0; k < K; ++k) net.rmin[k] = net.c[k] * std::max(0.0, chi(rng));
    net.interferers = full_interference(K);
    return net;
}

inline AlohaNetwork generate_aloha(std::size_t K, std::uint64_t seed) {
    return generate_aloha(K, seed, aloha_symmetric_boundary(K));
}

} // namespace mmp::problems
