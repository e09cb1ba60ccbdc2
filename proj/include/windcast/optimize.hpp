#pragma once

#include <functional>
#include <span>
#include <vector>

namespace windcast::opt {

/// Smooth bijection between an unconstrained coordinate and its feasible range.
struct CoordTransform {
    enum class Kind { unbounded, positive, interval };

    Kind kind = Kind::unbounded;
    double lo = 0.0;
    double hi = 0.0;

    static CoordTransform unbounded() { return {}; }
    static CoordTransform positive() { return {Kind::positive, 0.0, 0.0}; }
    static CoordTransform interval(double a, double b);

    double to_constrained(double u) const;
    double to_unconstrained(double x) const;
};

/// Objective to maximize, evaluated in constrained coordinates. Returning
/// -infinity marks an infeasible or degenerate point.
using Objective = std::function<double(std::span<const double>)>;

struct OptProblem {
    int dim = 0;
    Objective objective;
    std::vector<CoordTransform> transforms;  // empty = all unbounded
    std::vector<std::vector<double>> starts;  // constrained coordinates
};

struct OptOptions {
    double tol = 1e-8;
    int max_iter = 5000;
    /// Edge length of the initial simplex in unconstrained coordinates.
    double initial_step = 0.25;
};

struct OptResult {
    std::vector<double> argmax;  // constrained coordinates
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
    int evaluations = 0;
};

/**
 * Nelder-Mead simplex search (reflection 1, expansion 2, contraction 0.5,
 * shrink 0.5) run in the unconstrained space from every start; the best
 * result is returned. A start counts as converged when the simplex diameter
 * falls below `tol` and the value spread below `tol * max(1, |f|)`.
 *
 * Throws std::runtime_error if no feasible point is ever found.
 */
OptResult maximize(const OptProblem& problem, const OptOptions& options = {});

/// `center` plus n-1 Halton-sequence perturbations of half-width `spread` in
/// unconstrained coordinates; results are in constrained coordinates.
std::vector<std::vector<double>> halton_starts(std::span<const double> center,
                                               std::span<const CoordTransform> transforms,
                                               int n, double spread = 1.0);

/// Golden-section maximization of a unimodal function on [a, b].
struct ScalarResult {
    double argmax = 0.0;
    double value = 0.0;
    double min_seen = 0.0;  // smallest value evaluated, used for flatness checks
    int evaluations = 0;
};
ScalarResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                                double tol = 1e-6);

}  // namespace windcast::opt
