#pragma once

#include "windcast/transforms.hpp"

#include <span>
#include <string>
#include <vector>

namespace windcast {

/**
 * ARIMA(p,d,q)-GARCH(r,s) orders. The mean model acts on w_t = z_t - z_{t-1}
 * (d = 1) or on z_t itself (d = 0, diagnostic path only).
 */
struct ArimaGarchSpec {
    int p = 0;
    int q = 0;
    int r = 0;
    int s = 0;
    bool constant_variance = true;
    int d = 1;

    static constexpr int kMaxArma = 6;
    static constexpr int kMaxGarch = 2;

    void validate() const;
    /// Free coefficients: mu, phi, theta and either sigma^2 or (omega, alpha, beta).
    int n_params() const;
    int burn_in() const;
    std::string label() const;

    friend bool operator==(const ArimaGarchSpec&, const ArimaGarchSpec&) = default;
};

struct ArimaGarchParams {
    double mu = 0.0;
    std::vector<double> phi;
    std::vector<double> theta;
    double omega = 0.0;
    std::vector<double> alpha_g;
    std::vector<double> beta_g;
    double sigma2_const = 1.0;
};

struct FitReport {
    double loglik = 0.0;
    double bic = 0.0;
    int n_params = 0;
    int n_obs = 0;
    bool converged = false;
};

struct ArimaGarchModel {
    ArimaGarchSpec spec;
    ArimaGarchParams params;
    FitReport report;
    /// Pre-sample conditional variance used to seed the GARCH recursion.
    double presample_var = 1.0;
};

struct ArimaGarchFitOptions {
    int n_starts = 5;
    double tol = 1e-7;
    int max_iter = 5000;
};

/// Throws std::invalid_argument if stationarity, invertibility or GARCH
/// positivity / covariance stationarity is violated.
void check_params(const ArimaGarchSpec& spec, const ArimaGarchParams& params);

/// True when all roots of 1 - sum c_i B^i lie outside the unit circle.
bool is_stationary(std::span<const double> coeffs);

/// Maps partial autocorrelations in (-1,1) to coefficients of a stationary
/// AR polynomial (Durbin-Levinson recursion) and back.
std::vector<double> pacf_to_coefficients(std::span<const double> pacf);
std::vector<double> coefficients_to_pacf(std::span<const double> coeffs);

/// Conditional Gaussian log-likelihood of the mean-model input series `w`.
/// Pre-sample w and eps are zero, the pre-sample variance is the sample
/// variance of w, and the first burn_in() terms are excluded. Returns -inf
/// when a conditional variance is non-positive.
double loglik(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
              std::span<const double> w);
double loglik(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
              std::span<const double> w, double presample_var);

/// Maximum likelihood fit on the mean-model input series `w`.
ArimaGarchModel fit(const ArimaGarchSpec& spec, std::span<const double> w,
                    const ArimaGarchFitOptions& options = {});

/// Default search grid: p, q in 0..max_order, with (r,s) = (0,0) constant
/// variance and/or (1,1) GARCH.
std::vector<ArimaGarchSpec> default_grid(bool include_constant = true, bool include_garch = true,
                                         int max_order = 4);

struct SelectionResult {
    ArimaGarchModel best;
    std::vector<ArimaGarchModel> candidates;
    std::vector<std::string> failures;
};

/// Fits every spec (in parallel) and returns the converged fit with the
/// smallest BIC; ties go to fewer parameters, then lexicographic (p,q,r,s).
SelectionResult select_bic(std::span<const ArimaGarchSpec> grid, std::span<const double> w,
                           const ArimaGarchFitOptions& options = {});

/// Mean and variance of z_{t+j} | F_t for j = 1..h.
struct LevelForecast {
    std::vector<double> mean;
    std::vector<double> variance;
};

/**
 * Streaming residual recursion over the level series z. After observing
 * z_1..z_t, forecast(h) returns iterated conditional means (future shocks
 * zero) and MA-representation variances sum_j psi_{h-j}^2 sigma^2_{t+j|t}.
 */
class ArimaGarchFilter {
public:
    ArimaGarchFilter(ArimaGarchSpec spec, ArimaGarchParams params, double presample_var);

    void update(double z);
    std::size_t observations() const { return n_obs_; }
    LevelForecast forecast(int h) const;
    /// Innovation variance forecasts sigma^2_{eps;t+j|t}, j = 1..h.
    std::vector<double> innovation_variance(int h) const;
    /// psi_0..psi_{h-1} of the level process.
    std::vector<double> psi_weights(int h) const;

private:
    double next_innovation_variance() const;

    ArimaGarchSpec spec_;
    ArimaGarchParams params_;
    double presample_var_;
    std::size_t n_obs_ = 0;
    double last_z_ = 0.0;
    // Most recent first.
    std::vector<double> w_lags_;
    std::vector<double> eps_lags_;
    std::vector<double> eps2_lags_;
    std::vector<double> var_lags_;
    double var_next_ = 0.0;
    mutable std::vector<double> psi_cache_;
};

/// Runs ArimaGarchFilter over `z_history` (presample variance defaults to the
/// sample variance of the differenced history).
std::vector<double> forecast_mean(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
                                  std::span<const double> z_history, int h);
std::vector<double> forecast_variance(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
                                      std::span<const double> z_history, int h);
std::vector<LogisticNormal> forecast_density(const ArimaGarchSpec& spec,
                                             const ArimaGarchParams& params,
                                             std::span<const double> z_history, int h);

/// Sample variance (divisor n) of the mean-model input derived from z.
double default_presample_var(const ArimaGarchSpec& spec, std::span<const double> z_history);

/// Mean-model input: first differences for d = 1, the series itself for d = 0.
std::vector<double> model_input(const ArimaGarchSpec& spec, std::span<const double> z);

}  // namespace windcast
