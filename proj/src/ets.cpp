#include "windcast/ets.hpp"

#include "windcast/normal.hpp"
#include "windcast/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace windcast {

namespace {
constexpr double kLogVarClamp = 50.0;

double clamp_log_var(double v, bool& clamped) {
    if (v > kLogVarClamp || v < -kLogVarClamp) {
        clamped = true;
        return std::clamp(v, -kLogVarClamp, kLogVarClamp);
    }
    return v;
}
}  // namespace

EtsLevelState ets_init_level(double alpha, double phi_s, double y1) {
    return {alpha, phi_s, y1, y1, y1};
}

EtsLevelState ets_update_level(const EtsLevelState& state, double y) {
    EtsLevelState next = state;
    next.prev_S = state.S;
    next.S = state.alpha * y + (1.0 - state.alpha) * state.S;
    next.prev_y = y;
    return next;
}

double ets_one_step(const EtsLevelState& state) {
    return state.S + state.phi_s * (state.prev_y - state.prev_S);
}

std::vector<double> ets_forecast_level(const EtsLevelState& state, int h) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be positive");
    const double a = state.alpha;
    const double phi = state.phi_s;
    const double c = state.prev_y - state.prev_S;
    std::vector<double> out(static_cast<std::size_t>(h));
    double phi_hm1 = 1.0;  // phi^(h-1)
    for (int k = 1; k <= h; ++k) {
        const double phi_h = phi_hm1 * phi;
        out[static_cast<std::size_t>(k - 1)] =
            state.S + a * phi * (1.0 - phi_hm1) / (1.0 - phi) * c + phi_h * c;
        phi_hm1 = phi_h;
    }
    return out;
}

double ets_omega(double alpha, double phi_s, int h) {
    if (h < 0) throw std::invalid_argument("ets_omega: negative lag");
    const double ph = std::pow(phi_s, h);
    return ph + alpha * (1.0 - ph) / (1.0 - phi_s);
}

double ets_variance_h(double alpha, double phi_s, double s2_eps, int h) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be positive");
    if (!(std::abs(phi_s) < 1.0)) throw std::invalid_argument("ets_variance_h: |phi_s| must be < 1");
    double sum = 0.0;
    for (int j = 0; j < h; ++j) {
        const double om = ets_omega(alpha, phi_s, j);
        sum += om * om;
    }
    return s2_eps * sum;
}

std::vector<double> ets_combine_variance(double alpha, double phi_s,
                                         std::span<const double> innovation_var) {
    const std::size_t h = innovation_var.size();
    std::vector<double> om2(h);
    for (std::size_t j = 0; j < h; ++j) {
        const double om = ets_omega(alpha, phi_s, static_cast<int>(j));
        om2[j] = om * om;
    }
    std::vector<double> out(h);
    for (std::size_t hi = 1; hi <= h; ++hi) {
        double v = 0.0;
        for (std::size_t j = 1; j <= hi; ++j) v += om2[hi - j] * innovation_var[j - 1];
        out[hi - 1] = v;
    }
    return out;
}

double g_func(double e, double theta_v) { return theta_v * (std::abs(e) - kMeanAbsNormal); }

EtsVarState ets_init_var(double gamma, double phi_v, double theta_v, double log_v1) {
    return {gamma, phi_v, theta_v, log_v1, g_func(0.0, theta_v), log_v1};
}

EtsVarState ets_update_var(const EtsVarState& state, double e) {
    EtsVarState next = state;
    const double g = g_func(e, state.theta_v);
    next.prev_logV = state.logV;
    next.logV = state.gamma * g + (1.0 - state.gamma) * state.logV;
    next.prev_g = g;
    return next;
}

double ets_var_one_step_log(const EtsVarState& state) {
    return state.logV + state.phi_v * (state.prev_g - state.prev_logV);
}

EgarchVarianceForecast egarch_forecast_var(const EtsLevelState& level, const EtsVarState& var,
                                           int h, double g_bar) {
    if (h < 1) throw std::invalid_argument("forecast horizon must be positive");
    EgarchVarianceForecast out;
    out.innovation_var.resize(static_cast<std::size_t>(h));
    double log_s2 = ets_var_one_step_log(var);
    out.innovation_var[0] = std::exp(clamp_log_var(log_s2, out.clamped));
    for (int j = 2; j <= h; ++j) {
        const double g_prev = j == 2 ? var.prev_g : g_bar;
        log_s2 = (1.0 - var.gamma) * log_s2 + (var.gamma + var.phi_v) * g_bar - var.phi_v * g_prev;
        out.innovation_var[static_cast<std::size_t>(j - 1)] =
            std::exp(clamp_log_var(log_s2, out.clamped));
    }
    out.location_var = ets_combine_variance(level.alpha, level.phi_s, out.innovation_var);
    return out;
}

void EtsParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ETS alpha must lie in (0,1)");
    if (!(std::abs(phi_s) < 1.0)) throw std::invalid_argument("ETS phi_s must lie in (-1,1)");
    if (!with_variance) {
        if (!(s2_eps > 0.0)) throw std::invalid_argument("ETS s2_eps must be positive");
        return;
    }
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("ETS gamma must lie in (0,1)");
    if (!(std::abs(phi_v) < 1.0)) throw std::invalid_argument("ETS phi_v must lie in (-1,1)");
    if (!(theta_v > 0.0)) throw std::invalid_argument("ETS theta_v must be positive");
}

namespace {

double loglik_unchecked(const EtsParams& prm, std::span<const double> y, int burn_in) {
    const std::size_t n = y.size();
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    double S = y[0];
    double prev_S = y[0];
    double prev_y = y[0];
    double logV = prm.init_log_v;
    double prev_logV = prm.init_log_v;
    double g = g_func(0.0, prm.theta_v);
    const double log_s2_const = std::log(prm.s2_eps);

    double ll = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double loc = S + prm.phi_s * (prev_y - prev_S);
        double log_s2 = log_s2_const;
        if (prm.with_variance) {
            log_s2 = logV + prm.phi_v * (g - prev_logV);
            if (log_s2 > kLogVarClamp || log_s2 < -kLogVarClamp) return kNegInf;
        }
        const double s2 = std::exp(log_s2);
        const double s = std::sqrt(s2);
        const double eps = y[t] - loc;
        if (t > static_cast<std::size_t>(burn_in)) {
            const double z = normal_interval(-loc / s, (1.0 - loc) / s);
            if (!(z >= 1e-300)) return kNegInf;
            ll += -0.5 * eps * eps / s2 - 0.5 * log_s2 - std::log(z);
        }
        prev_S = S;
        S = prm.alpha * y[t] + (1.0 - prm.alpha) * S;
        prev_y = y[t];
        if (prm.with_variance) {
            g = g_func(eps / s, prm.theta_v);
            prev_logV = logV;
            logV = prm.gamma * g + (1.0 - prm.gamma) * logV;
        }
    }
    constexpr double kHalfLog2Pi = 0.91893853320467274178;
    const auto n_terms = static_cast<double>(n - 1 - std::min<std::size_t>(n - 1, burn_in));
    return ll - n_terms * kHalfLog2Pi;
}

}  // namespace

double ets_loglik(const EtsParams& params, std::span<const double> y, int burn_in) {
    params.validate();
    if (burn_in < 0) throw std::invalid_argument("burn-in must be nonnegative");
    if (y.size() < static_cast<std::size_t>(burn_in) + 2) {
        throw std::invalid_argument("ets_loglik: series shorter than burn-in");
    }
    return loglik_unchecked(params, y, burn_in);
}

double ets_mean_g(const EtsParams& params, std::span<const double> y, int burn_in) {
    params.validate();
    if (!params.with_variance) return 0.0;
    EtsFilter filter(params);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        filter.update(y[t]);
        if (t > static_cast<std::size_t>(burn_in)) {
            sum += filter.variance().prev_g;
            ++count;
        }
    }
    if (count == 0) throw std::invalid_argument("ets_mean_g: series shorter than burn-in");
    return sum / static_cast<double>(count);
}

EtsModel fit_ets(std::span<const double> y, bool with_variance, const EtsFitOptions& options) {
    if (y.size() < 500) throw std::invalid_argument("fit_ets: training length must be at least 500");
    for (double v : y) {
        if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("fit_ets: values must lie in (0,1)");
    }
    double dvar = 0.0;
    double dmean = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) dmean += y[i] - y[i - 1];
    dmean /= static_cast<double>(y.size() - 1);
    for (std::size_t i = 1; i < y.size(); ++i) {
        const double d = y[i] - y[i - 1] - dmean;
        dvar += d * d;
    }
    dvar /= static_cast<double>(y.size() - 1);
    if (!(dvar > 0.0)) throw std::invalid_argument("fit_ets: degenerate (constant) series");

    using opt::CoordTransform;
    std::vector<CoordTransform> transforms{CoordTransform::interval(0.0, 1.0),
                                           CoordTransform::interval(-1.0, 1.0)};
    std::vector<double> center{0.5, 0.2};
    if (with_variance) {
        transforms.push_back(CoordTransform::interval(0.0, 1.0));
        transforms.push_back(CoordTransform::interval(-1.0, 1.0));
        transforms.push_back(CoordTransform::positive());
        center.insert(center.end(), {0.1, 0.2, 0.5});
    } else {
        transforms.push_back(CoordTransform::positive());
        center.push_back(dvar);
    }

    EtsParams base;
    base.with_variance = with_variance;
    base.init_log_v = options.init_log_v;
    auto decode = [base](std::span<const double> x) {
        EtsParams p = base;
        p.alpha = x[0];
        p.phi_s = x[1];
        if (p.with_variance) {
            p.gamma = x[2];
            p.phi_v = x[3];
            p.theta_v = x[4];
        } else {
            p.s2_eps = x[2];
        }
        return p;
    };

    opt::OptProblem problem;
    problem.dim = static_cast<int>(center.size());
    problem.transforms = transforms;
    problem.starts = opt::halton_starts(center, transforms, std::max(1, options.n_starts), 1.0);
    problem.objective = [&](std::span<const double> x) {
        return loglik_unchecked(decode(x), y, options.burn_in);
    };
    opt::OptOptions oo;
    oo.tol = options.tol;
    oo.max_iter = options.max_iter;
    const auto res = opt::maximize(problem, oo);

    EtsModel model;
    model.params = decode(res.argmax);
    model.report.loglik = res.value;
    model.report.n_params = model.params.n_params();
    model.report.n_obs = static_cast<int>(y.size()) - 1 - options.burn_in;
    model.report.bic = model.report.n_params * std::log(static_cast<double>(model.report.n_obs)) -
                       2.0 * model.report.loglik;
    model.report.converged = res.converged;
    if (with_variance && options.g_bar_from_training) {
        model.params.g_bar = ets_mean_g(model.params, y, options.burn_in);
    }
    return model;
}

EtsFilter::EtsFilter(EtsParams params) : params_(params) { params_.validate(); }

void EtsFilter::update(double y) {
    if (n_obs_ == 0) {
        level_ = ets_init_level(params_.alpha, params_.phi_s, y);
        var_ = ets_init_var(params_.gamma, params_.phi_v, params_.theta_v, params_.init_log_v);
        ++n_obs_;
        return;
    }
    if (params_.with_variance) {
        const double loc = ets_one_step(level_);
        const double log_s2 = clamp_log_var(ets_var_one_step_log(var_), clamped_);
        const double e = (y - loc) / std::exp(0.5 * log_s2);
        var_ = ets_update_var(var_, e);
    }
    level_ = ets_update_level(level_, y);
    ++n_obs_;
}

std::vector<TruncNorm> EtsFilter::forecast(int h) const {
    if (n_obs_ == 0) throw std::logic_error("forecast requested before any observation");
    if (params_.with_variance) {
        const auto v = egarch_forecast_var(level_, var_, h, params_.g_bar);
        if (v.clamped) clamped_ = true;
        const auto loc = ets_forecast_level(level_, h);
        std::vector<TruncNorm> out;
        out.reserve(loc.size());
        for (std::size_t j = 0; j < loc.size(); ++j) out.emplace_back(loc[j], v.location_var[j]);
        return out;
    }
    return forecast_density_ets(params_, level_, var_, h);
}

std::vector<TruncNorm> forecast_density_ets(const EtsParams& params, const EtsLevelState& level,
                                            const EtsVarState& var, int h) {
    const auto loc = ets_forecast_level(level, h);
    std::vector<double> scale2;
    if (params.with_variance) {
        scale2 = egarch_forecast_var(level, var, h, params.g_bar).location_var;
    } else {
        const std::vector<double> innov(static_cast<std::size_t>(h), params.s2_eps);
        scale2 = ets_combine_variance(level.alpha, level.phi_s, innov);
    }
    std::vector<TruncNorm> out;
    out.reserve(loc.size());
    for (std::size_t j = 0; j < loc.size(); ++j) out.emplace_back(loc[j], scale2[j]);
    return out;
}

}  // namespace windcast
