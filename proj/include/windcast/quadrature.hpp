#pragma once

#include <functional>

namespace windcast {

struct QuadratureResult {
    double value = 0.0;
    double last_change = 0.0;
    int panels = 0;
    bool converged = false;
};

/**
 * Composite 10-point Gauss-Legendre rule on [a, b].
 *
 * The number of equal panels starts at `min_panels` and doubles until two
 * successive estimates differ by less than `tol`, or `max_panels` is reached
 * (converged = false in that case).
 */
QuadratureResult integrate_gauss_legendre(const std::function<double(double)>& f, double a,
                                          double b, double tol = 1e-8, int min_panels = 4,
                                          int max_panels = 1 << 14);

}  // namespace windcast
