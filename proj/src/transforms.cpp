#include "windcast/transforms.hpp"

#include "windcast/normal.hpp"
#include "windcast/quadrature.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace windcast {

LogisticNormal::LogisticNormal(double mean, double var) : z_mean(mean), z_var(var) {
    if (!std::isfinite(mean)) throw std::invalid_argument("LogisticNormal: non-finite mean");
    if (!(var > 0.0) || !std::isfinite(var)) {
        throw std::invalid_argument("LogisticNormal: variance must be positive");
    }
}

double logistic_fwd(double y) {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("logistic_fwd: y must lie in (0,1)");
    return std::log(y) - std::log1p(-y);
}

double logistic_inv(double z) {
    if (!std::isfinite(z)) throw std::domain_error("logistic_inv: non-finite input");
    // Saturated values stay strictly inside (0,1).
    if (z >= 0.0) return std::min(1.0 / (1.0 + std::exp(-z)), std::nextafter(1.0, 0.0));
    const double e = std::exp(z);
    return std::max(e / (1.0 + e), std::numeric_limits<double>::denorm_min());
}

double pushforward_log_pdf(const LogisticNormal& d, double y) {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("pushforward_pdf: y must lie in (0,1)");
    const double sd = std::sqrt(d.z_var);
    const double u = (logistic_fwd(y) - d.z_mean) / sd;
    return normal_log_pdf(u) - std::log(sd) - std::log(y) - std::log1p(-y);
}

double pushforward_pdf(const LogisticNormal& d, double y) {
    return std::exp(pushforward_log_pdf(d, y));
}

double pushforward_cdf(const LogisticNormal& d, double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    return normal_cdf((logistic_fwd(y) - d.z_mean) / std::sqrt(d.z_var));
}

double pushforward_mean(const LogisticNormal& d) {
    // Integrate in the standardized logit coordinate, where the integrand is smooth.
    const double sd = std::sqrt(d.z_var);
    auto integrand = [&](double u) { return logistic_inv(d.z_mean + sd * u) * normal_pdf(u); };
    const auto res = integrate_gauss_legendre(integrand, -12.0, 12.0, 1e-11, 4, 1 << 10);
    if (!res.converged) throw std::runtime_error("pushforward_mean: quadrature did not converge");
    return res.value;
}

double pushforward_quantile(const LogisticNormal& d, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("pushforward_quantile: p must lie in (0,1)");
    const double u = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
    return logistic_inv(d.z_mean + std::sqrt(d.z_var) * u);
}

double diagnostic_transform(double y, DiagnosticTransform kind) {
    switch (kind) {
        case DiagnosticTransform::log:
            if (!(y > 0.0)) throw std::domain_error("log transform needs y > 0");
            return std::log(y);
        case DiagnosticTransform::sqrt:
            if (y < 0.0) throw std::domain_error("sqrt transform needs y >= 0");
            return std::sqrt(y);
    }
    throw std::invalid_argument("unknown diagnostic transform");
}

}  // namespace windcast
