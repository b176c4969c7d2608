#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <utility>
#include <vector>

#include "box.hpp"
#include "error.hpp"
#include "feasibility.hpp"
#include "mm_function.hpp"
#include "problem.hpp"

namespace mmp {

/// Upper bound F(s, r) of the objective on [r, s].
inline double bound(const MMFunction& objective, const Box& box) {
    if (objective.dimension() != box.dimension())
        throw Error(Errc::DimensionMismatch, "objective and box dimensions differ");
    return objective.eval(box.upper, box.lower);
}

/// First index of a longest edge.
inline std::size_t split_axis(const Box& box) {
    std::size_t axis = 0;
    double widest = -1.0;
    for (std::size_t i = 0; i < box.dimension(); ++i) {
        const double w = box.width(i);
        if (w > widest) {
            widest = w;
            axis = i;
        }
    }
    return axis;
}

/// Midpoint bisection along the first longest edge. Both children get birth `iteration`.
inline std::pair<Box, Box> bisect(const Box& box, std::uint64_t iteration = 0) {
    if (!(box.diameter() > 0.0)) throw Error(Errc::ZeroDiameterBox, "cannot bisect a box of zero diameter");
    const std::size_t j = split_axis(box);
    const double v = 0.5 * (box.lower[j] + box.upper[j]);
    Box lo{box.lower, box.upper, iteration};
    Box hi{box.lower, box.upper, iteration};
    lo.upper[j] = v;
    hi.lower[j] = v;
    return {std::move(lo), std::move(hi)};
}

namespace detail {

/// sup{t in [0,1] : pred(t)} for a predicate that is true at 0 and monotone
/// (true then false). Returns the upper end of the final bracket, so the
/// result never underestimates the supremum.
template <class Pred>
double bracket_sup(Pred&& pred, int steps) {
    if (pred(1.0)) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < steps; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid)) lo = mid;
        else hi = mid;
    }
    return hi;
}

} // namespace detail

/// Shrinks `box` to a sub-box that keeps every feasible point x with
/// F(x, x) > gamma; nullopt when no such point can exist.
///
/// The lower corner moves up along each axis as far as F(., r) > gamma and
/// G_j(r, .) <= 0 allow, then the upper corner moves down relative to the
/// new lower corner. Each line search is `steps` halvings of [0, 1] rounded
/// up, which can only enlarge the result. A full-width bracket keeps the
/// original corner exactly so rounding cannot cut off boundary points.
inline std::optional<Box> reduce(const Box& box, const MMFunction& objective,
                                 const std::vector<MMConstraint>& constraints, double gamma, int steps) {
    if (steps < 1) throw Error(Errc::InvalidConfig, "reduction needs at least one bisection step");
    const Vec& r = box.lower;
    const Vec& s = box.upper;
    for (const auto& c : constraints)
        if (c.eval(r, s) > 0.0) return std::nullopt;
    if (objective.eval(s, r) <= gamma) return std::nullopt;

    auto admissible = [&](const Vec& x_arg, const Vec& y_arg, const Vec& gx, const Vec& gy) {
        if (!(objective.eval(x_arg, y_arg) > gamma)) return false;
        for (const auto& c : constraints)
            if (c.eval(gx, gy) > 0.0) return false;
        return true;
    };

    const std::size_t n = box.dimension();
    Vec r_new = r;
    Vec probe = s;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = s[i] - r[i];
        if (w <= 0.0) continue;
        const double a = detail::bracket_sup(
            [&](double t) {
                probe[i] = s[i] - t * w;
                return admissible(probe, r, r, probe);
            },
            steps);
        probe[i] = s[i];
        r_new[i] = a >= 1.0 ? r[i] : std::clamp(s[i] - a * w, r[i], s[i]);
    }

    if (!admissible(s, r_new, r_new, s)) return std::nullopt;

    Vec s_new = s;
    probe = r_new;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = s[i] - r_new[i];
        if (w <= 0.0) continue;
        const double b = detail::bracket_sup(
            [&](double t) {
                probe[i] = r_new[i] + t * w;
                return admissible(s, probe, probe, s);
            },
            steps);
        probe[i] = r_new[i];
        s_new[i] = b >= 1.0 ? s[i] : std::clamp(r_new[i] + b * w, r_new[i], s[i]);
    }
    return Box{std::move(r_new), std::move(s_new), box.birth};
}

/// Feasibility verdict for `box` under the problem's feasibility mode.
inline FeasibilityVerdict classify_box(const Box& box, const ProblemInstance& problem, const CornerValues& cv) {
    switch (problem.feasibility_mode) {
    case FeasibilityMode::mm_conclusive: {
        for (double v : cv.at_lower_upper)
            if (v > 0.0) return FeasibilityVerdict::infeasible();
        return FeasibilityVerdict::with_witness(split_witness(box, *shared_monotone_split(problem.constraints)));
    }
    case FeasibilityMode::normal:
    case FeasibilityMode::conormal: {
        const auto mm = mm_sufficient_test(cv);
        if (mm.is_infeasible()) return mm;
        auto set = problem.feasibility_mode == FeasibilityMode::normal ? normal_set_test(box, problem.normal)
                                                                        : conormal_set_test(box, problem.conormal);
        if (set.is_infeasible()) return set;
        return mm.kind == VerdictKind::FullyFeasible ? set : FeasibilityVerdict::unknown();
    }
    case FeasibilityMode::mm_sufficient_only: return mm_sufficient_test(cv);
    case FeasibilityMode::custom_oracle: {
        const auto mm = mm_sufficient_test(cv);
        if (mm.is_infeasible()) return mm;
        return problem.oracle(box);
    }
    }
    return FeasibilityVerdict::unknown();
}

inline FeasibilityVerdict classify_box(const Box& box, const ProblemInstance& problem) {
    return classify_box(box, problem, CornerValues::compute(box, problem.constraints));
}

namespace detail {

inline std::optional<Vec> incumbent_from(const Box& box, const ProblemInstance& problem,
                                         const FeasibilityVerdict& verdict) {
    if (verdict.is_infeasible()) return std::nullopt;
    if (verdict.witness) return verdict.witness;
    if (problem.incumbent_hook) {
        auto candidate = problem.incumbent_hook(box);
        if (candidate && box.contains(*candidate, 1e-12) && problem.is_feasible(*candidate)) return candidate;
    }
    if (verdict.kind == VerdictKind::FullyFeasible) return box.lower;
    return std::nullopt;
}

} // namespace detail

/// A point of box ∩ D, or nullopt. Tries the feasibility witness (conclusive,
/// normal, conormal or oracle), then the problem's incumbent hook, then the
/// lower corner when the whole box is known to be feasible.
inline std::optional<Vec> find_incumbent(const Box& box, const ProblemInstance& problem) {
    return detail::incumbent_from(box, problem, classify_box(box, problem));
}

/// Undecided boxes with their cached bounds.
struct Region {
    Box box;
    double bound = 0.0;
    std::uint64_t id = 0;
    std::size_t axis = 0;
};

/// Best-first pops a largest bound (ties: older box, then lower split axis,
/// then insertion order). Oldest-first pops in insertion order, which is
/// also nondecreasing birth order.
class RegionQueue {
public:
    explicit RegionQueue(SelectionRule rule) : rule_(rule) {}

    SelectionRule rule() const noexcept { return rule_; }
    std::size_t size() const noexcept { return rule_ == SelectionRule::best_first ? heap_.size() : fifo_.size(); }
    bool empty() const noexcept { return size() == 0; }

    void push(Region region) {
        if (rule_ == SelectionRule::best_first) {
            heap_.push_back(std::move(region));
            std::push_heap(heap_.begin(), heap_.end(), lower_priority);
        } else {
            fifo_.push_back(std::move(region));
        }
    }

    const Region& top() const { return rule_ == SelectionRule::best_first ? heap_.front() : fifo_.front(); }

    Region pop() {
        Region out;
        if (rule_ == SelectionRule::best_first) {
            std::pop_heap(heap_.begin(), heap_.end(), lower_priority);
            out = std::move(heap_.back());
            heap_.pop_back();
        } else {
            out = std::move(fifo_.front());
            fifo_.pop_front();
        }
        return out;
    }

    double max_bound() const {
        if (empty()) return -std::numeric_limits<double>::infinity();
        if (rule_ == SelectionRule::best_first) return heap_.front().bound;
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& r : fifo_) m = std::max(m, r.bound);
        return m;
    }

    void clear() {
        heap_.clear();
        fifo_.clear();
    }

private:
    static bool lower_priority(const Region& a, const Region& b) {
        if (a.bound != b.bound) return a.bound < b.bound;
        if (a.box.birth != b.box.birth) return a.box.birth > b.box.birth;
        if (a.axis != b.axis) return a.axis > b.axis;
        return a.id > b.id;
    }

    SelectionRule rule_;
    std::vector<Region> heap_;
    std::deque<Region> fifo_;
};

namespace detail {

class BranchReduceBound {
public:
    BranchReduceBound(const ProblemInstance& problem, const SolverConfig& config)
        : problem_(problem), config_(config), queue_(config.selection_rule), rng_(config.rng_seed) {}

    SolverResult run() {
        const auto start = std::chrono::steady_clock::now();
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

        std::optional<SolveStatus> limit;
        initialize();
        std::uint64_t k = 1;
        while (!queue_.empty()) {
            if (config_.max_iterations && result_.iterations >= *config_.max_iterations) {
                limit = SolveStatus::iteration_limit;
                break;
            }
            if (config_.max_wall_time && elapsed() >= *config_.max_wall_time) {
                limit = SolveStatus::time_limit;
                break;
            }
            if (config_.selection_rule == SelectionRule::oldest_first && k % 64 == 0 &&
                queue_.max_bound() <= threshold()) {
                result_.stats.stale_dropped += queue_.size();
                queue_.clear();
                break;
            }
            Region selected = queue_.pop();
            if (selected.bound <= threshold()) {
                ++result_.stats.stale_dropped;
                if (config_.selection_rule == SelectionRule::best_first) {
                    result_.stats.stale_dropped += queue_.size();
                    queue_.clear();
                }
                continue;
            }
            ++result_.iterations;
            branch(selected, k);
            if (config_.trace)
                *config_.trace << k << ',' << selected.id << ',' << selected.bound << ',' << gamma_ << ','
                               << queue_.size() << '\n';
            ++k;
        }

        result_.wall_time = elapsed();
        result_.value = gamma_;
        result_.incumbent = incumbent_;
        if (limit) result_.status = *limit;
        else if (!incumbent_) result_.status = SolveStatus::infeasible;
        else if (config_.epsilon_feasibility > 0.0) result_.status = SolveStatus::eps_eta_approximate;
        else if (config_.tolerance_mode == ToleranceMode::relative) result_.status = SolveStatus::relative_eta_optimal;
        else result_.status = SolveStatus::eta_optimal;
        return result_;
    }

private:
    static constexpr double degenerate_diameter = 1e-12;

    double threshold() const { return threshold(gamma_); }

    double threshold(double gamma) const {
        if (gamma == -std::numeric_limits<double>::infinity()) return gamma;
        if (config_.tolerance_mode == ToleranceMode::relative) return gamma + config_.eta * std::abs(gamma);
        return gamma + config_.eta;
    }

    void admit(const Vec& x) {
        const double v = problem_.objective.diagonal(x);
        if (v > gamma_) {
            gamma_ = v;
            incumbent_ = x;
        }
    }

    /// Incumbent search for one box; in approximate mode also tries r, the midpoint and s with slack epsilon.
    void search_incumbent(const Box& box, const FeasibilityVerdict& verdict) {
        if (auto x = incumbent_from(box, problem_, verdict)) {
            admit(*x);
            return;
        }
        if (config_.epsilon_feasibility > 0.0 && !verdict.is_infeasible()) {
            for (const Vec& c : {box.lower, box.midpoint(), box.upper})
                if (problem_.is_feasible(c, config_.epsilon_feasibility)) admit(c);
        }
    }

    void try_degenerate(const Box& box) {
        const double slack = config_.epsilon_feasibility > 0.0 ? config_.epsilon_feasibility : 1e-9;
        if (problem_.is_feasible(box.lower, slack)) admit(box.lower);
        ++result_.stats.degenerate_dropped;
    }

    void push(Box box, double u) {
        Region region{std::move(box), u, next_id_++, 0};
        region.axis = split_axis(region.box);
        queue_.push(std::move(region));
        result_.peak_region_count = std::max(result_.peak_region_count, queue_.size());
    }

    void initialize() {
        const Box& root = problem_.initial_box;
        ++result_.stats.boxes_created;
        const auto verdict = classify_box(root, problem_);
        if (verdict.is_infeasible()) {
            ++result_.stats.pruned_infeasible;
            return;
        }
        search_incumbent(root, verdict);
        if (root.diameter() < degenerate_diameter) {
            try_degenerate(root);
            return;
        }
        push(Box{root.lower, root.upper, 0}, bound(problem_.objective, root));
    }

    void branch(const Region& selected, std::uint64_t k) {
        const double gamma_before = gamma_;
        auto [lo, hi] = bisect(selected.box, k);
        result_.stats.boxes_created += 2;

        struct Child {
            Box box;
            double u;
        };
        std::vector<Child> kept;
        kept.reserve(2);
        for (Box* child : {&lo, &hi}) {
            Box box = std::move(*child);
            if (config_.reduction_enabled) {
                auto reduced = reduce(box, problem_.objective, problem_.constraints, gamma_before,
                                      config_.reduction_bisection_steps);
                if (!reduced) {
                    ++result_.stats.reduced_to_empty;
                    continue;
                }
                box = std::move(*reduced);
            }
            const auto verdict = classify_box(box, problem_);
            if (verdict.is_infeasible()) {
                ++result_.stats.pruned_infeasible;
                if (config_.audit_pruning) audit(box, true);
                continue;
            }
            search_incumbent(box, verdict);
            const double u = bound(problem_.objective, box);
            kept.push_back({std::move(box), u});
        }

        for (auto& child : kept) {
            if (child.u <= threshold()) {
                ++result_.stats.pruned_by_bound;
                if (config_.audit_pruning) audit(child.box, false);
                continue;
            }
            if (child.box.diameter() < degenerate_diameter) {
                try_degenerate(child.box);
                continue;
            }
            push(std::move(child.box), child.u);
        }
    }

    /// Samples a pruned box. Bound-pruned boxes must not contain feasible points
    /// above the threshold; infeasibility-pruned boxes must not contain strictly
    /// feasible points.
    void audit(const Box& box, bool pruned_as_infeasible) {
        for (int n = 0; n < 1000; ++n) {
            const Vec x = sample_point(box, rng_);
            ++result_.stats.audit_samples;
            if (pruned_as_infeasible) {
                if (problem_.is_feasible(x, -1e-9)) ++result_.stats.audit_violations;
            } else if (problem_.is_feasible(x) && problem_.objective.diagonal(x) > threshold() + 1e-9) {
                ++result_.stats.audit_violations;
            }
        }
    }

    const ProblemInstance& problem_;
    const SolverConfig& config_;
    RegionQueue queue_;
    std::mt19937_64 rng_;
    SolverResult result_;
    double gamma_ = -std::numeric_limits<double>::infinity();
    std::optional<Vec> incumbent_;
    std::uint64_t next_id_ = 0;
};

} // namespace detail

/// Branch-reduce-and-bound maximization of the problem's objective.
///
/// Each iteration selects a region, bisects it, optionally reduces both
/// children against the best value known before the iteration, updates the
/// incumbent from the children and prunes children that are infeasible or
/// whose bound does not exceed gamma + eta (relative mode: gamma + eta*|gamma|).
/// The run ends when no region can improve the incumbent by more than the
/// tolerance, or when an iteration or time limit trips.
inline SolverResult solve(const ProblemInstance& problem, const SolverConfig& config) {
    problem.validate();
    config.validate();
    return detail::BranchReduceBound(problem, config).run();
}

} // namespace mmp
