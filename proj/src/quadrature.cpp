#include "windcast/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace windcast {

namespace {

constexpr int kOrder = 10;

struct GaussLegendreRule {
    std::array<double, kOrder> nodes{};
    std::array<double, kOrder> weights{};

    GaussLegendreRule() {
        // Newton iteration on P_n starting from the Chebyshev-like guesses.
        for (int i = 0; i < kOrder; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= kOrder; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            nodes[static_cast<std::size_t>(i)] = x;
            weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
};

const GaussLegendreRule& rule() {
    static const GaussLegendreRule r;
    return r;
}

double composite(const std::function<double(double)>& f, double a, double b, int panels) {
    const auto& gl = rule();
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double mid = lo + 0.5 * width;
        double s = 0.0;
        for (int i = 0; i < kOrder; ++i) {
            s += gl.weights[static_cast<std::size_t>(i)] *
                 f(mid + 0.5 * width * gl.nodes[static_cast<std::size_t>(i)]);
        }
        total += 0.5 * width * s;
    }
    return total;
}

}  // namespace

QuadratureResult integrate_gauss_legendre(const std::function<double(double)>& f, double a,
                                          double b, double tol, int min_panels, int max_panels) {
    if (!(b > a)) throw std::invalid_argument("integrate_gauss_legendre: empty interval");
    if (min_panels < 1) min_panels = 1;
    QuadratureResult res;
    int panels = min_panels;
    double prev = composite(f, a, b, panels);
    while (panels < max_panels) {
        panels *= 2;
        const double cur = composite(f, a, b, panels);
        res.last_change = std::abs(cur - prev);
        res.value = cur;
        res.panels = panels;
        if (res.last_change < tol) {
            res.converged = true;
            return res;
        }
        prev = cur;
    }
    res.value = prev;
    return res;
}

}  // namespace windcast
