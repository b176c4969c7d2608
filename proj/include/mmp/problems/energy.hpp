#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "../calculus.hpp"
#include "../error.hpp"
#include "../problem.hpp"
#include "../solver.hpp"
#include "interference.hpp"

namespace mmp::problems {

/// Power consumption model: phi_k amplifier inefficiency, Pc static circuit
/// power (global EE), Pc_user per-user circuit power (WSEE/WMEE), B bandwidth.
struct EnergyModel {
    Vec phi;
    double Pc = 1.0;
    Vec Pc_user;
    double B = 1.0;

    void validate(std::size_t K, bool per_user) const {
        auto fail = [](const std::string& what) { throw Error(Errc::InvalidNetwork, what); };
        if (phi.size() != K) fail("phi must have K entries");
        for (double p : phi)
            if (!(p >= 0.0) || !std::isfinite(p)) fail("phi must be finite and nonnegative");
        if (!(B > 0.0)) fail("bandwidth B must be positive");
        if (per_user) {
            if (Pc_user.size() != K) fail("per-user circuit power needs K entries");
            for (double p : Pc_user)
                if (!(p > 0.0)) fail("per-user circuit power must be positive");
        } else if (!(Pc > 0.0)) {
            fail("circuit power Pc must be positive");
        }
    }
};

namespace detail {

inline Vec unit_weight(std::size_t K, std::size_t k, double v) {
    Vec e(K, 0.0);
    e[k] = v;
    return e;
}

inline ProblemInstance box_only_problem(MMFunction objective, const InterferenceNetwork& net) {
    return ProblemInstance{
        .objective = std::move(objective),
        .constraints = {},
        .initial_box = net.power_box(),
        .feasibility_mode = FeasibilityMode::normal,
        .normal = {},
        .conormal = {},
        .oracle = {},
        .incumbent_hook = {},
    };
}

/// w_k B R_k(x, y) / (phi_k y_k + Pc_k).
inline std::vector<MMFunction> user_ee_terms(const InterferenceNetwork& net, const EnergyModel& energy) {
    std::vector<MMFunction> terms;
    terms.reserve(net.K);
    for (std::size_t k = 0; k < net.K; ++k) {
        auto num = mm_weighted_sum({net.w[k] * energy.B}, {rate_mm(net, k)});
        auto den = mm_affine_x(unit_weight(net.K, k, energy.phi[k]), energy.Pc_user[k]);
        terms.push_back(mm_ratio(std::move(num), std::move(den)));
    }
    return terms;
}

} // namespace detail

/// B sum_k R_k(x, y) / (phi^T y + Pc).
inline MMFunction gee_objective(const InterferenceNetwork& net, const EnergyModel& energy) {
    net.validate();
    energy.validate(net.K, false);
    auto num = mm_weighted_sum(Vec(net.K, energy.B), rates(net, RateRepresentation::mmp));
    return mm_ratio(std::move(num), mm_affine_x(energy.phi, energy.Pc));
}

/// Global energy efficiency over [0, P]; no rate constraints.
inline ProblemInstance gee_problem(const InterferenceNetwork& net, const EnergyModel& energy) {
    return detail::box_only_problem(gee_objective(net, energy), net);
}

inline ProblemInstance wsee_problem(const InterferenceNetwork& net, const EnergyModel& energy) {
    net.validate();
    energy.validate(net.K, true);
    return detail::box_only_problem(mm_sum(detail::user_ee_terms(net, energy)), net);
}

inline ProblemInstance wmee_problem(const InterferenceNetwork& net, const EnergyModel& energy) {
    net.validate();
    energy.validate(net.K, true);
    return detail::box_only_problem(mm_min(detail::user_ee_terms(net, energy)), net);
}

/// Parametric problem max B sum_k r_k(p) - lambda (phi^T p + Pc) over [0, P],
/// rates in difference-of-logs form.
inline ProblemInstance dinkelbach_subproblem(const InterferenceNetwork& net, const EnergyModel& energy, double lambda) {
    net.validate();
    energy.validate(net.K, false);
    const double lam = std::max(lambda, 0.0);
    const ScalarMap cost{[lam](double v) { return -lam * v; }, Monotonicity::nonincreasing, "cost"};
    auto objective = mm_sum({mm_weighted_sum(Vec(net.K, energy.B), rates(net, RateRepresentation::dm)),
                             mm_compose_nonincreasing(cost, mm_affine_x(energy.phi, energy.Pc))});
    return detail::box_only_problem(std::move(objective), net);
}

struct DinkelbachResult : SolverResult {
    std::size_t outer_iterations = 0;
    std::vector<double> lambdas;
};

/// Dinkelbach iteration for the global EE starting at lambda = 0; each
/// parametric problem is solved by branch-reduce-and-bound with
/// `inner_config`. Stops when the parametric optimum is <= lambda_tol.
/// `value` is the global EE at the final point, iterations accumulate.
inline DinkelbachResult dinkelbach_gee(const InterferenceNetwork& net, const EnergyModel& energy,
                                       const SolverConfig& inner_config, double lambda_tol = 1e-6,
                                       std::size_t max_outer = 100) {
    if (!(lambda_tol > 0.0)) throw Error(Errc::InvalidConfig, "lambda_tol must be positive");
    const MMFunction gee = gee_objective(net, energy);
    DinkelbachResult out;
    double lambda = 0.0;
    double elapsed = 0.0;
    while (out.outer_iterations < max_outer) {
        out.lambdas.push_back(lambda);
        const SolverResult inner = solve(dinkelbach_subproblem(net, energy, lambda), inner_config);
        ++out.outer_iterations;
        elapsed += inner.wall_time;
        out.iterations += inner.iterations;
        out.peak_region_count = std::max(out.peak_region_count, inner.peak_region_count);
        if (!inner.converged() || !inner.incumbent)
            throw Error(Errc::InnerSolveFailed, "parametric subproblem ended with status " +
                                                    std::string(to_string(inner.status)));
        out.incumbent = inner.incumbent;
        out.value = gee.diagonal(*inner.incumbent);
        out.status = inner.status;
        out.stats = inner.stats;
        if (inner.value <= lambda_tol) break;
        lambda = out.value;
    }
    out.wall_time = elapsed;
    return out;
}

} // namespace mmp::problems
