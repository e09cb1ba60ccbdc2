#pragma once

#include "windcast/arima_garch.hpp"
#include "windcast/truncnorm.hpp"

#include <span>
#include <vector>

namespace windcast {

/// Level smoother S_t = alpha y_t + (1 - alpha) S_{t-1} with error-correction forecast.
struct EtsLevelState {
    double alpha = 0.5;
    double phi_s = 0.0;
    double S = 0.0;       // S_t
    double prev_S = 0.0;  // S_{t-1}
    double prev_y = 0.0;  // y_t
};

/// Log-variance smoother driven by g(e_t) = theta_v (|e_t| - sqrt(2/pi)).
struct EtsVarState {
    double gamma = 0.1;
    double phi_v = 0.0;
    double theta_v = 1.0;
    double logV = 0.0;       // log V_t
    double prev_g = 0.0;     // g(e_t), the most recent input
    double prev_logV = 0.0;  // log V_{t-1}
};

/// S_1 = S_0 = y_1.
EtsLevelState ets_init_level(double alpha, double phi_s, double y1);
EtsLevelState ets_update_level(const EtsLevelState& state, double y);
/// S_t + phi_s (y_t - S_{t-1}).
double ets_one_step(const EtsLevelState& state);
/// Closed-form h-step location forecasts, h = 1..h.
std::vector<double> ets_forecast_level(const EtsLevelState& state, int h);

/// Omega_h = phi^h + alpha (1 - phi^h) / (1 - phi); Omega_0 = 1.
double ets_omega(double alpha, double phi_s, int h);
/// s2_eps * sum_{j=1}^h Omega_{h-j}^2.
double ets_variance_h(double alpha, double phi_s, double s2_eps, int h);
/// Location variance for horizons 1..H given innovation variances s^2_{t+j|t}.
std::vector<double> ets_combine_variance(double alpha, double phi_s,
                                         std::span<const double> innovation_var);

double g_func(double e, double theta_v);

/// log V_1 = log_v1 (= log V_0), g(e_1) evaluated at e_1 = 0.
EtsVarState ets_init_var(double gamma, double phi_v, double theta_v, double log_v1 = 0.0);
EtsVarState ets_update_var(const EtsVarState& state, double e);
/// log s^2_{t+1|t} = log V_t + phi_v (g(e_t) - log V_{t-1}).
double ets_var_one_step_log(const EtsVarState& state);

struct EgarchVarianceForecast {
    std::vector<double> innovation_var;  // s^2_{eps;t+j|t}
    std::vector<double> location_var;    // s^2_{t+j|t}
    bool clamped = false;                // a log-variance hit the +-50 clamp
};

/// Iterates the EGARCH(2,1) form with future g(e) replaced by g_bar.
EgarchVarianceForecast egarch_forecast_var(const EtsLevelState& level, const EtsVarState& var,
                                           int h, double g_bar = 0.0);

struct EtsParams {
    bool with_variance = false;
    double alpha = 0.5;
    double phi_s = 0.0;
    double s2_eps = 1e-3;  // constant innovation variance (level-only model)
    double gamma = 0.1;
    double phi_v = 0.0;
    double theta_v = 1.0;
    double g_bar = 0.0;
    double init_log_v = 0.0;

    int n_params() const { return with_variance ? 5 : 3; }
    void validate() const;
};

struct EtsFitOptions {
    int burn_in = 96;
    double init_log_v = 0.0;
    int n_starts = 5;
    double tol = 1e-7;
    int max_iter = 5000;
    /// Plug the training mean of g(e_t) in for future g(e); false uses 0.
    bool g_bar_from_training = true;
};

struct EtsModel {
    EtsParams params;
    FitReport report;
};

/// Truncated-normal one-step log-likelihood of y, skipping `burn_in` terms.
double ets_loglik(const EtsParams& params, std::span<const double> y, int burn_in = 96);

/// Mean of g(e_t) over the filtered training residuals after burn-in.
double ets_mean_g(const EtsParams& params, std::span<const double> y, int burn_in = 96);

/// Maximum likelihood over (alpha, phi_s, s2_eps) or (alpha, phi_s, gamma, phi_v, theta_v).
EtsModel fit_ets(std::span<const double> y, bool with_variance, const EtsFitOptions& options = {});

/// Streaming smoother that yields truncated-normal forecasts at the current origin.
class EtsFilter {
public:
    explicit EtsFilter(EtsParams params);

    void update(double y);
    std::size_t observations() const { return n_obs_; }
    std::vector<TruncNorm> forecast(int h) const;
    const EtsLevelState& level() const { return level_; }
    const EtsVarState& variance() const { return var_; }
    /// True once any variance forecast hit the log-variance clamp.
    bool clamped() const { return clamped_; }

private:
    EtsParams params_;
    EtsLevelState level_;
    EtsVarState var_;
    std::size_t n_obs_ = 0;
    mutable bool clamped_ = false;
};

/// Packages location and variance forecasts into TruncNorm descriptors. `var`
/// is ignored for the level-only model.
std::vector<TruncNorm> forecast_density_ets(const EtsParams& params, const EtsLevelState& level,
                                            const EtsVarState& var, int h);

}  // namespace windcast
