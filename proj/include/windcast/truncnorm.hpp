#pragma once

namespace windcast {

/// Normal(loc, scale2) restricted to (0,1) and renormalized.
struct TruncNorm {
    double loc = 0.5;
    double scale2 = 1.0;

    TruncNorm() = default;
    TruncNorm(double loc, double scale2);

    double scale() const;
    /// Phi((1 - loc)/s) - Phi(-loc/s); throws std::domain_error below 1e-300.
    double normalizer() const;
};

double truncnorm_pdf(const TruncNorm& d, double y);
double truncnorm_log_pdf(const TruncNorm& d, double y);
double truncnorm_cdf(const TruncNorm& d, double y);
/// Bisection on the cdf to 1e-10.
double truncnorm_quantile(const TruncNorm& d, double p);
/// loc + s (phi(a) - phi(b)) / (Phi(b) - Phi(a)) with a = -loc/s, b = (1 - loc)/s.
double truncnorm_mean(const TruncNorm& d);

/// Log density without validation; -inf when the normalizer underflows.
double truncnorm_log_pdf_unchecked(double loc, double scale2, double y);

}  // namespace windcast
