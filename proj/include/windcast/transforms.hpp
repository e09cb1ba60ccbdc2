#pragma once

namespace windcast {

/// Gaussian N(z_mean, z_var) on the logit scale, viewed as a density on (0,1).
struct LogisticNormal {
    double z_mean = 0.0;
    double z_var = 1.0;

    LogisticNormal() = default;
    LogisticNormal(double mean, double var);
};

/// log(y / (1 - y)); throws std::domain_error outside (0,1).
double logistic_fwd(double y);
/// 1 / (1 + exp(-z)); throws std::domain_error for non-finite z.
double logistic_inv(double z);

/// Gaussian density in z times the Jacobian 1 / (y (1 - y)).
double pushforward_pdf(const LogisticNormal& d, double y);
double pushforward_log_pdf(const LogisticNormal& d, double y);
/// Phi((logit(y) - z_mean) / sqrt(z_var)); 0 and 1 at the closed endpoints.
double pushforward_cdf(const LogisticNormal& d, double y);
/// E[Y] by Gauss-Legendre quadrature; throws std::runtime_error if it does not converge.
double pushforward_mean(const LogisticNormal& d);
/// Inverse cdf; exact through the normal quantile on the logit scale.
double pushforward_quantile(const LogisticNormal& d, double p);

enum class DiagnosticTransform { log, sqrt };

double diagnostic_transform(double y, DiagnosticTransform kind);

}  // namespace windcast
