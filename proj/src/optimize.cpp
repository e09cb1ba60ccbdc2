#include "windcast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace windcast::opt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double radical_inverse(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

struct Minimizer {
    const OptProblem& problem;
    const OptOptions& options;
    int evaluations = 0;
    std::vector<double> scratch;

    // Cost in unconstrained coordinates (negated objective, +inf when infeasible).
    double cost(const std::vector<double>& u) {
        ++evaluations;
        scratch.resize(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            scratch[i] = problem.transforms.empty() ? u[i]
                                                    : problem.transforms[i].to_constrained(u[i]);
        }
        const double v = problem.objective(scratch);
        return std::isnan(v) ? kInf : -v;
    }

    struct Run {
        std::vector<double> best;
        double cost = kInf;
        bool converged = false;
        int iterations = 0;
    };

    Run nelder_mead(std::vector<double> x0, int budget) {
        const std::size_t n = x0.size();
        std::vector<std::vector<double>> simplex(n + 1, x0);
        std::vector<double> f(n + 1);
        for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += options.initial_step;
        for (std::size_t i = 0; i <= n; ++i) f[i] = cost(simplex[i]);

        std::vector<std::size_t> order(n + 1);
        std::vector<double> centroid(n), xr(n), xe(n), xc(n);
        Run run;
        int it = 0;
        for (; it < budget; ++it) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            const std::size_t best = order.front();
            const std::size_t worst = order.back();
            const std::size_t second = order[n - 1];

            double diameter = 0.0;
            for (std::size_t i = 0; i <= n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
                }
            }
            const double spread = f[worst] - f[best];
            if (std::isfinite(f[best]) && diameter < options.tol &&
                spread <= options.tol * std::max(1.0, std::abs(f[best]))) {
                run.converged = true;
                break;
            }

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == worst) continue;
                for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
            }
            for (double& c : centroid) c /= static_cast<double>(n);

            for (std::size_t j = 0; j < n; ++j) {
                xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
            }
            const double fr = cost(xr);
            if (fr < f[best]) {
                for (std::size_t j = 0; j < n; ++j) {
                    xe[j] = centroid[j] + 2.0 * (xr[j] - centroid[j]);
                }
                const double fe = cost(xe);
                if (fe < fr) {
                    simplex[worst] = xe;
                    f[worst] = fe;
                } else {
                    simplex[worst] = xr;
                    f[worst] = fr;
                }
                continue;
            }
            if (fr < f[second]) {
                simplex[worst] = xr;
                f[worst] = fr;
                continue;
            }
            // Outside contraction when the reflected point beats the worst, inside otherwise.
            const bool outside = fr < f[worst];
            for (std::size_t j = 0; j < n; ++j) {
                xc[j] = outside ? centroid[j] + 0.5 * (xr[j] - centroid[j])
                                : centroid[j] + 0.5 * (simplex[worst][j] - centroid[j]);
            }
            const double fc = cost(xc);
            if (fc < (outside ? fr : f[worst])) {
                simplex[worst] = xc;
                f[worst] = fc;
                continue;
            }
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best) continue;
                for (std::size_t j = 0; j < n; ++j) {
                    simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                }
                f[i] = cost(simplex[i]);
            }
        }
        const auto best = static_cast<std::size_t>(
            std::min_element(f.begin(), f.end()) - f.begin());
        run.best = simplex[best];
        run.cost = f[best];
        run.iterations = it;
        return run;
    }

    // Nelder-Mead with restarts from the incumbent until a restart no longer improves.
    Run solve(std::vector<double> x0) {
        Run total;
        int remaining = options.max_iter;
        for (int restart = 0; restart < 4 && remaining > 0; ++restart) {
            Run r = nelder_mead(x0, remaining);
            remaining -= r.iterations + 1;
            total.iterations += r.iterations;
            const double improvement = total.cost - r.cost;
            if (r.cost < total.cost) {
                total.best = r.best;
                total.cost = r.cost;
            }
            total.converged = r.converged;
            if (!r.converged) break;
            if (restart > 0 && !(improvement > options.tol * std::max(1.0, std::abs(r.cost)))) {
                break;
            }
            x0 = total.best;
        }
        return total;
    }
};

}  // namespace

CoordTransform CoordTransform::interval(double a, double b) {
    if (!(b > a)) throw std::invalid_argument("CoordTransform::interval: empty interval");
    return {Kind::interval, a, b};
}

double CoordTransform::to_constrained(double u) const {
    switch (kind) {
        case Kind::unbounded:
            return u;
        case Kind::positive:
            return std::exp(std::clamp(u, -700.0, 700.0));
        case Kind::interval: {
            const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u))
                                      : std::exp(u) / (1.0 + std::exp(u));
            // Keep strictly inside the open interval even when the logistic saturates.
            const double eps = 1e-15;
            return lo + (hi - lo) * std::clamp(s, eps, 1.0 - eps);
        }
    }
    return u;
}

double CoordTransform::to_unconstrained(double x) const {
    switch (kind) {
        case Kind::unbounded:
            return x;
        case Kind::positive:
            if (!(x > 0.0)) throw std::domain_error("positive transform: x must be > 0");
            return std::log(x);
        case Kind::interval: {
            if (!(x > lo && x < hi)) throw std::domain_error("interval transform: x outside range");
            const double s = (x - lo) / (hi - lo);
            return std::log(s) - std::log1p(-s);
        }
    }
    return x;
}

std::vector<std::vector<double>> halton_starts(std::span<const double> center,
                                               std::span<const CoordTransform> transforms,
                                               int n, double spread) {
    std::vector<std::vector<double>> out;
    if (n <= 0) return out;
    out.emplace_back(center.begin(), center.end());
    const std::size_t d = center.size();
    std::vector<double> u0(d);
    for (std::size_t j = 0; j < d; ++j) {
        u0[j] = transforms.empty() ? center[j] : transforms[j].to_unconstrained(center[j]);
    }
    for (int k = 1; k < n; ++k) {
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) {
            const int base = kPrimes[j % std::size(kPrimes)];
            const double h = radical_inverse(k, base);
            const double u = u0[j] + spread * (2.0 * h - 1.0);
            x[j] = transforms.empty() ? u : transforms[j].to_constrained(u);
        }
        out.push_back(std::move(x));
    }
    return out;
}

OptResult maximize(const OptProblem& problem, const OptOptions& options) {
    if (problem.dim < 1) throw std::invalid_argument("maximize: dim must be >= 1");
    if (problem.starts.empty()) throw std::invalid_argument("maximize: need at least one start");
    if (!problem.transforms.empty() &&
        problem.transforms.size() != static_cast<std::size_t>(problem.dim)) {
        throw std::invalid_argument("maximize: transform count does not match dim");
    }

    Minimizer m{problem, options, 0, {}};
    OptResult best;
    double best_cost = kInf;
    for (const auto& start : problem.starts) {
        if (start.size() != static_cast<std::size_t>(problem.dim)) {
            throw std::invalid_argument("maximize: start has wrong dimension");
        }
        std::vector<double> u(start.size());
        for (std::size_t j = 0; j < start.size(); ++j) {
            u[j] = problem.transforms.empty() ? start[j]
                                              : problem.transforms[j].to_unconstrained(start[j]);
        }
        auto run = m.solve(std::move(u));
        best.iterations += run.iterations;
        if (run.cost < best_cost || best.argmax.empty()) {
            best_cost = run.cost;
            best.argmax.resize(run.best.size());
            for (std::size_t j = 0; j < run.best.size(); ++j) {
                best.argmax[j] = problem.transforms.empty()
                                     ? run.best[j]
                                     : problem.transforms[j].to_constrained(run.best[j]);
            }
            best.converged = run.converged;
        }
    }
    best.evaluations = m.evaluations;
    if (!std::isfinite(best_cost)) {
        throw std::runtime_error("maximize: objective infeasible at every evaluated point");
    }
    best.value = -best_cost;
    return best;
}

ScalarResult golden_section_max(const std::function<double(double)>& f, double a, double b,
                                double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    ScalarResult res;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    res.evaluations = 2;
    res.min_seen = std::min(fc, fd);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
            res.min_seen = std::min(res.min_seen, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
            res.min_seen = std::min(res.min_seen, fd);
        }
        ++res.evaluations;
    }
    if (fc > fd) {
        res.argmax = c;
        res.value = fc;
    } else {
        res.argmax = d;
        res.value = fd;
    }
    return res;
}

}  // namespace windcast::opt
