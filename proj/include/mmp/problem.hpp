#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "box.hpp"
#include "error.hpp"
#include "feasibility.hpp"
#include "mm_function.hpp"

namespace mmp {

/// How box feasibility is decided.
///   mm_conclusive      all constraints share a monotone split; exact test.
///   normal / conormal  D is described by `normal` / `conormal` functions;
///                      MM constraints, if any, only prune via the sufficient test.
///   mm_sufficient_only only the one-sided MM tests; the algorithm may not be finite.
///   custom_oracle      `oracle` decides.
enum class FeasibilityMode { mm_conclusive, normal, conormal, mm_sufficient_only, custom_oracle };

constexpr std::string_view to_string(FeasibilityMode m) noexcept {
    switch (m) {
    case FeasibilityMode::mm_conclusive: return "mm-conclusive";
    case FeasibilityMode::normal: return "normal";
    case FeasibilityMode::conormal: return "conormal";
    case FeasibilityMode::mm_sufficient_only: return "mm-sufficient-only";
    case FeasibilityMode::custom_oracle: return "custom-oracle";
    }
    return "?";
}

using BoxOracle = std::function<FeasibilityVerdict(const Box&)>;
using IncumbentHook = std::function<std::optional<Vec>(const Box&)>;

/// max F(x, x) over D, D given by `constraints` (G_i(x, x) <= 0) plus the
/// optional normal/conormal descriptions, all inside `initial_box`.
struct ProblemInstance {
    MMFunction objective;
    std::vector<MMConstraint> constraints;
    Box initial_box;
    FeasibilityMode feasibility_mode = FeasibilityMode::mm_sufficient_only;
    std::vector<PointFn> normal;
    std::vector<PointFn> conormal;
    BoxOracle oracle;
    IncumbentHook incumbent_hook;

    std::size_t dimension() const noexcept { return objective.dimension(); }

    void validate() const {
        const std::size_t n = objective.dimension();
        if (initial_box.dimension() != n)
            throw Error(Errc::InvalidProblem, "initial box dimension differs from objective dimension");
        for (const auto& c : constraints)
            if (c.g.dimension() != n) throw Error(Errc::InvalidProblem, "constraint dimension differs from objective");
        if (feasibility_mode == FeasibilityMode::mm_conclusive) {
            if (!shared_monotone_split(constraints))
                throw Error(Errc::MissingMonotoneSplit, "mm-conclusive mode needs a shared monotone split");
            if (!normal.empty() || !conormal.empty())
                throw Error(Errc::InvalidProblem, "mm-conclusive mode takes MM constraints only");
        }
        if (feasibility_mode == FeasibilityMode::custom_oracle && !oracle)
            throw Error(Errc::InvalidProblem, "custom-oracle mode needs an oracle");
        if (feasibility_mode == FeasibilityMode::normal && !conormal.empty())
            throw Error(Errc::InvalidProblem, "normal mode does not take conormal functions");
        if (feasibility_mode == FeasibilityMode::conormal && !normal.empty())
            throw Error(Errc::InvalidProblem, "conormal mode does not take normal functions");
    }

    /// Pointwise membership in D with constraint slack `slack`.
    bool is_feasible(std::span<const double> x, double slack = 1e-9) const {
        if (!initial_box.contains(x, slack)) return false;
        for (const auto& c : constraints)
            if (c.at(x) > slack) return false;
        for (const auto& g : normal)
            if (g(x) > slack) return false;
        for (const auto& h : conormal)
            if (h(x) < -slack) return false;
        if (feasibility_mode == FeasibilityMode::custom_oracle) {
            const Vec p(x.begin(), x.end());
            if (!oracle(Box{p, p, 0}).is_feasible()) return false;
        }
        return true;
    }
};

enum class ToleranceMode { absolute, relative };
enum class SelectionRule { best_first, oldest_first };

constexpr std::string_view to_string(SelectionRule s) noexcept {
    return s == SelectionRule::best_first ? "best" : "oldest";
}

struct SolverConfig {
    double eta = 0.01;
    ToleranceMode tolerance_mode = ToleranceMode::absolute;
    SelectionRule selection_rule = SelectionRule::best_first;
    bool reduction_enabled = false;
    int reduction_bisection_steps = 10;
    /// Constraint slack for admitting incumbents; 0 disables the approximate mode.
    double epsilon_feasibility = 0.0;
    std::optional<std::uint64_t> max_iterations;
    std::optional<double> max_wall_time;
    std::uint64_t rng_seed = 0;
    /// Per-iteration CSV trace `k,box_id,U,gamma,queue_size` when set.
    std::ostream* trace = nullptr;
    /// Samples every bound-pruned box for feasible points above the threshold.
    bool audit_pruning = false;

    void validate() const {
        if (!(eta > 0.0)) throw Error(Errc::InvalidConfig, "eta must be positive");
        if (reduction_bisection_steps < 1) throw Error(Errc::InvalidConfig, "reduction_bisection_steps must be >= 1");
        if (!(epsilon_feasibility >= 0.0)) throw Error(Errc::InvalidConfig, "epsilon_feasibility must be >= 0");
    }
};

enum class SolveStatus { eta_optimal, relative_eta_optimal, eps_eta_approximate, infeasible, iteration_limit, time_limit };

constexpr std::string_view to_string(SolveStatus s) noexcept {
    switch (s) {
    case SolveStatus::eta_optimal: return "eta-optimal";
    case SolveStatus::relative_eta_optimal: return "relative-eta-optimal";
    case SolveStatus::eps_eta_approximate: return "eps-eta-approximate";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::iteration_limit: return "iteration-limit";
    case SolveStatus::time_limit: return "time-limit";
    }
    return "?";
}

struct SolverStats {
    std::uint64_t boxes_created = 0;
    std::uint64_t pruned_by_bound = 0;
    std::uint64_t pruned_infeasible = 0;
    std::uint64_t reduced_to_empty = 0;
    std::uint64_t degenerate_dropped = 0;
    std::uint64_t stale_dropped = 0;
    std::uint64_t audit_samples = 0;
    std::uint64_t audit_violations = 0;
};

struct SolverResult {
    std::optional<Vec> incumbent;
    double value = -std::numeric_limits<double>::infinity();
    SolveStatus status = SolveStatus::infeasible;
    std::uint64_t iterations = 0;
    std::size_t peak_region_count = 0;
    double wall_time = 0.0;
    SolverStats stats;

    bool converged() const noexcept {
        return status == SolveStatus::eta_optimal || status == SolveStatus::relative_eta_optimal ||
               status == SolveStatus::eps_eta_approximate;
    }
};

} // namespace mmp
