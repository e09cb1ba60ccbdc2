#include "windcast/truncnorm.hpp"

#include "windcast/normal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace windcast {

namespace {
constexpr double kMinNormalizer = 1e-300;
}  // namespace

TruncNorm::TruncNorm(double l, double s2) : loc(l), scale2(s2) {
    if (!std::isfinite(l)) throw std::invalid_argument("TruncNorm: non-finite location");
    if (!(s2 > 0.0) || !std::isfinite(s2)) {
        throw std::invalid_argument("TruncNorm: scale^2 must be positive");
    }
}

double TruncNorm::scale() const { return std::sqrt(scale2); }

double TruncNorm::normalizer() const {
    const double s = scale();
    const double z = normal_interval(-loc / s, (1.0 - loc) / s);
    if (!(z >= kMinNormalizer)) {
        throw std::domain_error("TruncNorm: degenerate normalizer (no mass on (0,1))");
    }
    return z;
}

double truncnorm_log_pdf_unchecked(double loc, double scale2, double y) {
    const double s = std::sqrt(scale2);
    const double z = normal_interval(-loc / s, (1.0 - loc) / s);
    if (!(z >= kMinNormalizer)) return -std::numeric_limits<double>::infinity();
    return normal_log_pdf((y - loc) / s) - std::log(s) - std::log(z);
}

double truncnorm_log_pdf(const TruncNorm& d, double y) {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("truncnorm_pdf: y must lie in (0,1)");
    const double s = d.scale();
    return normal_log_pdf((y - d.loc) / s) - std::log(s) - std::log(d.normalizer());
}

double truncnorm_pdf(const TruncNorm& d, double y) { return std::exp(truncnorm_log_pdf(d, y)); }

double truncnorm_cdf(const TruncNorm& d, double y) {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const double s = d.scale();
    const double a = -d.loc / s;
    return std::clamp(normal_interval(a, (y - d.loc) / s) / d.normalizer(), 0.0, 1.0);
}

double truncnorm_quantile(const TruncNorm& d, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("truncnorm_quantile: p must lie in (0,1)");
    d.normalizer();
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        if (truncnorm_cdf(d, mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double truncnorm_mean(const TruncNorm& d) {
    const double s = d.scale();
    const double a = -d.loc / s;
    const double b = (1.0 - d.loc) / s;
    const double m = d.loc + s * (normal_pdf(a) - normal_pdf(b)) / d.normalizer();
    return std::clamp(m, 0.0, 1.0);
}

}  // namespace windcast
