#include "doctest.h"

#include "windcast/optimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace windcast::opt;

TEST_CASE("coordinate transforms are inverse pairs") {
    const auto iv = CoordTransform::interval(-1.0, 1.0);
    const auto pos = CoordTransform::positive();
    const auto un = CoordTransform::unbounded();
    for (double u = -30.0; u <= 30.0; u += 0.7) {
        const double x = iv.to_constrained(u);
        CHECK(x > -1.0);
        CHECK(x < 1.0);
        CHECK(pos.to_constrained(u) > 0.0);
        CHECK(un.to_constrained(u) == u);
    }
    for (double x : {-0.99, -0.2, 0.0, 0.5, 0.95}) {
        CHECK(iv.to_constrained(iv.to_unconstrained(x)) == doctest::Approx(x).epsilon(1e-12));
    }
    for (double x : {1e-6, 0.3, 2.0, 400.0}) {
        CHECK(pos.to_constrained(pos.to_unconstrained(x)) == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK_THROWS(CoordTransform::interval(1.0, 1.0));
}

TEST_CASE("one-dimensional quadratic") {
    OptProblem p;
    p.dim = 1;
    p.objective = [](std::span<const double> x) { return -(x[0] - 3.0) * (x[0] - 3.0); };
    p.starts = {{0.0}};
    const auto r = maximize(p, {1e-8, 5000, 0.25});
    CHECK(r.converged);
    CHECK(std::abs(r.argmax[0] - 3.0) < 1e-4);
}

TEST_CASE("negated Rosenbrock from three starts") {
    OptProblem p;
    p.dim = 2;
    p.objective = [](std::span<const double> x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return -(a * a + 100.0 * b * b);
    };
    p.starts = {{-1.2, 1.0}, {0.0, 0.0}, {2.0, -1.0}};
    const auto r = maximize(p);
    CHECK(std::abs(r.argmax[0] - 1.0) < 1e-2);
    CHECK(std::abs(r.argmax[1] - 1.0) < 1e-2);
}

TEST_CASE("interval-constrained quadratic never leaves the interval") {
    OptProblem p;
    p.dim = 1;
    p.transforms = {CoordTransform::interval(0.0, 1.0)};
    bool escaped = false;
    p.objective = [&escaped](std::span<const double> x) {
        if (!(x[0] > 0.0 && x[0] < 1.0)) escaped = true;
        return -(x[0] - 0.9) * (x[0] - 0.9);
    };
    p.starts = {{0.2}};
    const auto r = maximize(p);
    CHECK_FALSE(escaped);
    CHECK(std::abs(r.argmax[0] - 0.9) < 1e-4);
}

TEST_CASE("best value dominates every start and runs are reproducible") {
    OptProblem p;
    p.dim = 3;
    p.transforms = {CoordTransform::unbounded(), CoordTransform::positive(),
                    CoordTransform::interval(-1.0, 1.0)};
    p.objective = [](std::span<const double> x) {
        return -std::pow(x[0] - 0.3, 2) - std::pow(std::log(x[1]) - 1.0, 2) -
               std::pow(x[2] + 0.5, 2) + 0.1 * std::cos(5.0 * x[0]);
    };
    const std::vector<double> center{0.0, 1.0, 0.0};
    p.starts = halton_starts(center, p.transforms, 5);
    REQUIRE(p.starts.size() == 5);
    CHECK(p.starts[0] == center);
    for (const auto& s : p.starts) {
        CHECK(s[1] > 0.0);
        CHECK(std::abs(s[2]) < 1.0);
    }

    const auto a = maximize(p);
    const auto b = maximize(p);
    CHECK(a.argmax == b.argmax);
    CHECK(a.value == b.value);
    for (const auto& s : p.starts) CHECK(a.value >= p.objective(s));
}

TEST_CASE("infeasible regions and failure") {
    OptProblem p;
    p.dim = 1;
    p.objective = [](std::span<const double> x) {
        return x[0] > 2.0 ? -std::numeric_limits<double>::infinity() : -(x[0] - 1.5) * (x[0] - 1.5);
    };
    p.starts = {{0.0}};
    CHECK(std::abs(maximize(p).argmax[0] - 1.5) < 1e-4);

    OptProblem bad;
    bad.dim = 2;
    bad.objective = [](std::span<const double>) { return -std::numeric_limits<double>::infinity(); };
    bad.starts = {{0.0, 0.0}};
    CHECK_THROWS_AS(maximize(bad), std::runtime_error);

    OptProblem empty;
    empty.dim = 1;
    empty.objective = [](std::span<const double>) { return 0.0; };
    CHECK_THROWS(maximize(empty));
}

TEST_CASE("iteration cap reports non-convergence") {
    OptProblem p;
    p.dim = 2;
    p.objective = [](std::span<const double> x) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        return -(a * a + 100.0 * b * b);
    };
    p.starts = {{-1.2, 1.0}};
    const auto r = maximize(p, {1e-12, 10, 0.25});
    CHECK_FALSE(r.converged);
    CHECK(r.iterations <= 10);
}

TEST_CASE("golden section") {
    const auto r = golden_section_max([](double x) { return -std::pow(x - 0.37, 2); }, 0.0, 1.0, 1e-8);
    CHECK(std::abs(r.argmax - 0.37) < 1e-6);
    CHECK(r.min_seen <= r.value);
    const auto edge = golden_section_max([](double x) { return x; }, 0.0, 1.0, 1e-8);
    CHECK(edge.argmax > 0.999);
}
