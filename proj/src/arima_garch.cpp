#include "windcast/arima_garch.hpp"

#include "windcast/optimize.hpp"
#include "windcast/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>

namespace windcast {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x) {
    const double m = mean_of(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size());
}

void require_length(const ArimaGarchSpec& spec, std::size_t n) {
    const auto need = static_cast<std::size_t>(spec.p + spec.q + std::max(spec.r, spec.s) + 10);
    if (n <= need) {
        throw std::invalid_argument("series too short for " + spec.label() + ": need more than " +
                                    std::to_string(need) + " observations");
    }
}

}  // namespace

void ArimaGarchSpec::validate() const {
    if (p < 0 || q < 0 || r < 0 || s < 0) throw std::invalid_argument("negative model order");
    if (p > kMaxArma || q > kMaxArma) throw std::invalid_argument("ARMA order above 6");
    if (r > kMaxGarch || s > kMaxGarch) throw std::invalid_argument("GARCH order above 2");
    if (constant_variance && (r != 0 || s != 0)) {
        throw std::invalid_argument("constant-variance spec must have r = s = 0");
    }
    if (d != 0 && d != 1) throw std::invalid_argument("differencing order must be 0 or 1");
}

int ArimaGarchSpec::n_params() const {
    return 1 + p + q + (constant_variance ? 1 : 1 + r + s);
}

int ArimaGarchSpec::burn_in() const { return std::max({p, q, r, s}); }

std::string ArimaGarchSpec::label() const {
    std::string out = "ARIMA(" + std::to_string(p) + "," + std::to_string(d) + "," +
                      std::to_string(q) + ")";
    if (!constant_variance) out += "-GARCH(" + std::to_string(r) + "," + std::to_string(s) + ")";
    return out;
}

std::vector<double> pacf_to_coefficients(std::span<const double> pacf) {
    std::vector<double> a;
    a.reserve(pacf.size());
    for (std::size_t k = 0; k < pacf.size(); ++k) {
        const double u = pacf[k];
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = a[j] - u * a[k - 1 - j];
        next[k] = u;
        a = std::move(next);
    }
    return a;
}

std::vector<double> coefficients_to_pacf(std::span<const double> coeffs) {
    std::vector<double> a(coeffs.begin(), coeffs.end());
    std::vector<double> pacf(a.size());
    for (std::size_t k = a.size(); k-- > 0;) {
        const double u = a[k];
        pacf[k] = u;
        if (!(std::abs(u) < 1.0)) {
            throw std::invalid_argument("polynomial is not stationary");
        }
        std::vector<double> prev(k);
        const double denom = 1.0 - u * u;
        for (std::size_t j = 0; j < k; ++j) prev[j] = (a[j] + u * a[k - 1 - j]) / denom;
        a = std::move(prev);
    }
    return pacf;
}

bool is_stationary(std::span<const double> coeffs) {
    try {
        coefficients_to_pacf(coeffs);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

void check_params(const ArimaGarchSpec& spec, const ArimaGarchParams& params) {
    spec.validate();
    if (params.phi.size() != static_cast<std::size_t>(spec.p) ||
        params.theta.size() != static_cast<std::size_t>(spec.q)) {
        throw std::invalid_argument("ARMA coefficient count does not match spec");
    }
    if (!is_stationary(params.phi)) throw std::invalid_argument("AR polynomial is not stationary");
    std::vector<double> neg_theta(params.theta.size());
    std::transform(params.theta.begin(), params.theta.end(), neg_theta.begin(),
                   [](double v) { return -v; });
    if (!is_stationary(neg_theta)) throw std::invalid_argument("MA polynomial is not invertible");
    if (spec.constant_variance) {
        if (!(params.sigma2_const > 0.0)) throw std::invalid_argument("sigma^2 must be positive");
        return;
    }
    if (params.alpha_g.size() != static_cast<std::size_t>(spec.r) ||
        params.beta_g.size() != static_cast<std::size_t>(spec.s)) {
        throw std::invalid_argument("GARCH coefficient count does not match spec");
    }
    if (!(params.omega > 0.0)) throw std::invalid_argument("omega must be positive");
    double total = 0.0;
    for (double v : params.alpha_g) {
        if (v < 0.0) throw std::invalid_argument("GARCH alpha must be nonnegative");
        total += v;
    }
    for (double v : params.beta_g) {
        if (v < 0.0) throw std::invalid_argument("GARCH beta must be nonnegative");
        total += v;
    }
    if (!(total < 1.0)) throw std::invalid_argument("GARCH persistence must be below 1");
}

namespace {

// Likelihood recursion without validation; shared by loglik() and the fit objective.
double loglik_unchecked(const ArimaGarchSpec& spec, const ArimaGarchParams& prm,
                        std::span<const double> w, double v0, std::vector<double>& eps,
                        std::vector<double>& var) {
    const std::size_t n = w.size();
    const auto m = static_cast<std::size_t>(spec.burn_in());
    const auto p = static_cast<std::size_t>(spec.p);
    const auto q = static_cast<std::size_t>(spec.q);
    const auto r = static_cast<std::size_t>(spec.r);
    const auto s = static_cast<std::size_t>(spec.s);
    eps.assign(n, 0.0);
    if (!spec.constant_variance) var.assign(n, 0.0);

    double ll = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        double mean = prm.mu;
        for (std::size_t i = 1; i <= std::min(p, t); ++i) mean += prm.phi[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= std::min(q, t); ++j) mean += prm.theta[j - 1] * eps[t - j];
        const double e = w[t] - mean;
        eps[t] = e;

        double s2;
        if (spec.constant_variance) {
            s2 = prm.sigma2_const;
        } else {
            s2 = prm.omega;
            for (std::size_t i = 1; i <= std::min(r, t); ++i) {
                s2 += prm.alpha_g[i - 1] * eps[t - i] * eps[t - i];
            }
            for (std::size_t j = 1; j <= s; ++j) {
                s2 += prm.beta_g[j - 1] * (j <= t ? var[t - j] : v0);
            }
            var[t] = s2;
        }
        if (!(s2 > 0.0) || !std::isfinite(s2) || !std::isfinite(e)) return kNegInf;
        if (t >= m) ll += -0.5 * (kLog2Pi + std::log(s2) + e * e / s2);
    }
    return ll;
}

}  // namespace

double loglik(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
              std::span<const double> w, double presample_var) {
    check_params(spec, params);
    require_length(spec, w.size());
    if (!(presample_var > 0.0)) throw std::invalid_argument("pre-sample variance must be positive");
    std::vector<double> eps;
    std::vector<double> var;
    return loglik_unchecked(spec, params, w, presample_var, eps, var);
}

double loglik(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
              std::span<const double> w) {
    const double v0 = w.empty() ? 0.0 : variance_of(w);
    if (!(v0 > 0.0)) throw std::invalid_argument("loglik: zero-variance input series");
    return loglik(spec, params, w, v0);
}

namespace {

// Coordinate layout: mu | AR pacf | MA pacf | sigma^2 or omega | GARCH raw weights.
struct Layout {
    ArimaGarchSpec spec;

    int dim() const { return 2 + spec.p + spec.q + (spec.constant_variance ? 0 : spec.r + spec.s); }

    std::vector<opt::CoordTransform> transforms() const {
        std::vector<opt::CoordTransform> t;
        t.push_back(opt::CoordTransform::unbounded());
        for (int i = 0; i < spec.p + spec.q; ++i) t.push_back(opt::CoordTransform::interval(-1.0, 1.0));
        t.push_back(opt::CoordTransform::positive());
        if (!spec.constant_variance) {
            for (int i = 0; i < spec.r + spec.s; ++i) t.push_back(opt::CoordTransform::unbounded());
        }
        return t;
    }

    void decode(std::span<const double> x, ArimaGarchParams& prm) const {
        std::size_t k = 0;
        prm.mu = x[k++];
        prm.phi = pacf_to_coefficients(x.subspan(k, static_cast<std::size_t>(spec.p)));
        k += static_cast<std::size_t>(spec.p);
        auto ma = pacf_to_coefficients(x.subspan(k, static_cast<std::size_t>(spec.q)));
        k += static_cast<std::size_t>(spec.q);
        prm.theta.resize(ma.size());
        for (std::size_t j = 0; j < ma.size(); ++j) prm.theta[j] = -ma[j];
        if (spec.constant_variance) {
            prm.sigma2_const = x[k];
            prm.omega = 0.0;
            prm.alpha_g.clear();
            prm.beta_g.clear();
            return;
        }
        prm.omega = x[k++];
        const auto rs = static_cast<std::size_t>(spec.r + spec.s);
        double denom = 1.0;
        double shift = 0.0;
        for (std::size_t i = 0; i < rs; ++i) shift = std::max(shift, x[k + i]);
        // softmax against an implicit zero coordinate, computed with a max shift
        denom = std::exp(-shift);
        std::vector<double> ex(rs);
        for (std::size_t i = 0; i < rs; ++i) {
            ex[i] = std::exp(x[k + i] - shift);
            denom += ex[i];
        }
        prm.alpha_g.assign(ex.begin(), ex.begin() + spec.r);
        prm.beta_g.assign(ex.begin() + spec.r, ex.end());
        for (double& v : prm.alpha_g) v /= denom;
        for (double& v : prm.beta_g) v /= denom;
    }

    std::vector<double> center(double mean_w, double var_w) const {
        std::vector<double> c;
        c.push_back(mean_w);
        for (int i = 0; i < spec.p; ++i) c.push_back(0.1);
        for (int i = 0; i < spec.q; ++i) c.push_back(0.1);
        if (spec.constant_variance) {
            c.push_back(var_w);
            return c;
        }
        c.push_back(0.05 * var_w);
        // alpha total 0.05, beta total 0.9
        const double rest = 0.05;
        for (int i = 0; i < spec.r; ++i) c.push_back(std::log(0.05 / spec.r / rest));
        for (int i = 0; i < spec.s; ++i) c.push_back(std::log(0.9 / spec.s / rest));
        return c;
    }
};

}  // namespace

ArimaGarchModel fit(const ArimaGarchSpec& spec, std::span<const double> w,
                    const ArimaGarchFitOptions& options) {
    spec.validate();
    require_length(spec, w.size());
    const double v_raw = variance_of(w);
    if (!(v_raw > 0.0) || !std::isfinite(v_raw)) {
        throw std::invalid_argument("fit: degenerate (zero-variance) input series");
    }

    // Fit on w / sd so the simplex scale is comparable across data sets.
    const double sd = std::sqrt(v_raw);
    std::vector<double> ws(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) ws[i] = w[i] / sd;
    const double v_std = variance_of(ws);

    const Layout layout{spec};
    const auto transforms = layout.transforms();
    const auto center = layout.center(mean_of(ws), v_std);

    opt::OptProblem problem;
    problem.dim = layout.dim();
    problem.transforms = transforms;
    problem.starts = opt::halton_starts(center, transforms, std::max(1, options.n_starts), 1.0);
    problem.objective = [&, prm = ArimaGarchParams{}, eps = std::vector<double>{},
                         var = std::vector<double>{}](std::span<const double> x) mutable {
        layout.decode(x, prm);
        return loglik_unchecked(spec, prm, ws, v_std, eps, var);
    };

    opt::OptOptions oo;
    oo.tol = options.tol;
    oo.max_iter = options.max_iter;
    const opt::OptResult res = opt::maximize(problem, oo);

    ArimaGarchModel model;
    model.spec = spec;
    layout.decode(res.argmax, model.params);
    model.params.mu *= sd;
    model.params.sigma2_const *= v_raw;
    model.params.omega *= v_raw;
    if (spec.constant_variance) model.params.sigma2_const = std::max(model.params.sigma2_const, 0.0);
    model.presample_var = v_raw;

    const auto n_obs = static_cast<int>(w.size()) - spec.burn_in();
    model.report.n_obs = n_obs;
    model.report.n_params = spec.n_params();
    model.report.loglik = res.value - static_cast<double>(n_obs) * std::log(sd);
    model.report.bic = model.report.n_params * std::log(static_cast<double>(n_obs)) -
                       2.0 * model.report.loglik;
    model.report.converged = res.converged;
    return model;
}

std::vector<ArimaGarchSpec> default_grid(bool include_constant, bool include_garch,
                                         int max_order) {
    std::vector<ArimaGarchSpec> grid;
    for (int p = 0; p <= max_order; ++p) {
        for (int q = 0; q <= max_order; ++q) {
            if (include_constant) grid.push_back({p, q, 0, 0, true, 1});
            if (include_garch) grid.push_back({p, q, 1, 1, false, 1});
        }
    }
    return grid;
}

SelectionResult select_bic(std::span<const ArimaGarchSpec> grid, std::span<const double> w,
                           const ArimaGarchFitOptions& options) {
    if (grid.empty()) throw std::invalid_argument("select_bic: empty grid");
    std::vector<std::optional<ArimaGarchModel>> fits(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            fits[i] = fit(grid[i], w, options);
        } catch (const std::exception& e) {
            errors[i] = grid[i].label() + ": " + e.what();
        }
    });

    SelectionResult out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (fits[i] && std::isfinite(fits[i]->report.bic)) {
            out.candidates.push_back(*fits[i]);
        } else {
            out.failures.push_back(errors[i].empty() ? grid[i].label() + ": non-finite likelihood"
                                                     : errors[i]);
        }
    }
    if (out.candidates.empty()) throw std::runtime_error("select_bic: all fits failed");

    const bool any_converged = std::any_of(out.candidates.begin(), out.candidates.end(),
                                           [](const auto& m) { return m.report.converged; });
    auto key = [](const ArimaGarchModel& m) {
        return std::make_tuple(m.report.bic, m.report.n_params, m.spec.p, m.spec.q, m.spec.r,
                               m.spec.s);
    };
    const ArimaGarchModel* best = nullptr;
    for (const auto& m : out.candidates) {
        if (any_converged && !m.report.converged) continue;
        if (best == nullptr || key(m) < key(*best)) best = &m;
    }
    out.best = *best;
    return out;
}

ArimaGarchFilter::ArimaGarchFilter(ArimaGarchSpec spec, ArimaGarchParams params,
                                   double presample_var)
    : spec_(spec), params_(std::move(params)), presample_var_(presample_var) {
    check_params(spec_, params_);
    if (!(presample_var_ > 0.0)) throw std::invalid_argument("pre-sample variance must be positive");
    w_lags_.assign(static_cast<std::size_t>(spec_.p), 0.0);
    eps_lags_.assign(static_cast<std::size_t>(spec_.q), 0.0);
    eps2_lags_.assign(static_cast<std::size_t>(spec_.r), 0.0);
    var_lags_.assign(static_cast<std::size_t>(spec_.s), presample_var_);
    var_next_ = next_innovation_variance();
}

double ArimaGarchFilter::next_innovation_variance() const {
    if (spec_.constant_variance) return params_.sigma2_const;
    double s2 = params_.omega;
    for (std::size_t i = 0; i < eps2_lags_.size(); ++i) s2 += params_.alpha_g[i] * eps2_lags_[i];
    for (std::size_t j = 0; j < var_lags_.size(); ++j) s2 += params_.beta_g[j] * var_lags_[j];
    return s2;
}

namespace {

void push_front(std::vector<double>& lags, double v) {
    if (lags.empty()) return;
    std::copy_backward(lags.begin(), lags.end() - 1, lags.end());
    lags.front() = v;
}

}  // namespace

void ArimaGarchFilter::update(double z) {
    ++n_obs_;
    double w = z;
    if (spec_.d == 1) {
        const bool first = n_obs_ == 1;
        w = z - last_z_;
        last_z_ = z;
        if (first) return;
    } else {
        last_z_ = z;
    }

    double mean = params_.mu;
    for (std::size_t i = 0; i < w_lags_.size(); ++i) mean += params_.phi[i] * w_lags_[i];
    for (std::size_t j = 0; j < eps_lags_.size(); ++j) mean += params_.theta[j] * eps_lags_[j];
    const double e = w - mean;
    const double s2 = var_next_;

    push_front(w_lags_, w);
    push_front(eps_lags_, e);
    push_front(eps2_lags_, e * e);
    push_front(var_lags_, s2);
    var_next_ = next_innovation_variance();
}

std::vector<double> ArimaGarchFilter::innovation_variance(int h) const {
    if (h < 1) throw std::invalid_argument("forecast horizon must be positive");
    std::vector<double> sig(static_cast<std::size_t>(h) + 1, 0.0);  // 1-based
    sig[1] = var_next_;
    for (int j = 2; j <= h; ++j) {
        if (spec_.constant_variance) {
            sig[static_cast<std::size_t>(j)] = params_.sigma2_const;
            continue;
        }
        double s2 = params_.omega;
        for (int i = 1; i <= spec_.r; ++i) {
            const int m = j - i;
            const double e2 = m >= 1 ? sig[static_cast<std::size_t>(m)]
                                     : eps2_lags_[static_cast<std::size_t>(-m)];
            s2 += params_.alpha_g[static_cast<std::size_t>(i - 1)] * e2;
        }
        for (int k = 1; k <= spec_.s; ++k) {
            const int m = j - k;
            const double v = m >= 1 ? sig[static_cast<std::size_t>(m)]
                                    : var_lags_[static_cast<std::size_t>(-m)];
            s2 += params_.beta_g[static_cast<std::size_t>(k - 1)] * v;
        }
        sig[static_cast<std::size_t>(j)] = s2;
    }
    sig.erase(sig.begin());
    return sig;
}

std::vector<double> ArimaGarchFilter::psi_weights(int h) const {
    if (psi_cache_.size() < static_cast<std::size_t>(h)) {
        // Level AR polynomial: (1 - B)^d (1 - sum phi_i B^i) = 1 - sum a_i B^i.
        std::vector<double> a(params_.phi);
        if (spec_.d == 1) {
            a.push_back(0.0);
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double prev = i == 0 ? -1.0 : params_.phi[i - 1];
                const double cur = i < params_.phi.size() ? params_.phi[i] : 0.0;
                a[i] = cur - prev;
            }
        }
        std::vector<double> psi(static_cast<std::size_t>(h), 0.0);
        psi[0] = 1.0;
        for (std::size_t j = 1; j < psi.size(); ++j) {
            double v = j <= params_.theta.size() ? params_.theta[j - 1] : 0.0;
            for (std::size_t i = 1; i <= std::min(j, a.size()); ++i) v += a[i - 1] * psi[j - i];
            psi[j] = v;
        }
        psi_cache_ = std::move(psi);
    }
    return {psi_cache_.begin(), psi_cache_.begin() + h};
}

LevelForecast ArimaGarchFilter::forecast(int h) const {
    if (h < 1) throw std::invalid_argument("forecast horizon must be positive");
    if (n_obs_ == 0) throw std::logic_error("forecast requested before any observation");
    const auto hh = static_cast<std::size_t>(h);

    LevelForecast out;
    out.mean.resize(hh);
    std::vector<double> wf(hh);
    for (std::size_t j = 1; j <= hh; ++j) {
        double v = params_.mu;
        for (std::size_t i = 1; i <= w_lags_.size(); ++i) {
            v += params_.phi[i - 1] * (i < j ? wf[j - i - 1] : w_lags_[i - j]);
        }
        for (std::size_t k = j; k <= eps_lags_.size(); ++k) {
            v += params_.theta[k - 1] * eps_lags_[k - j];
        }
        wf[j - 1] = v;
    }
    double level = last_z_;
    for (std::size_t j = 0; j < hh; ++j) {
        if (spec_.d == 1) {
            level += wf[j];
            out.mean[j] = level;
        } else {
            out.mean[j] = wf[j];
        }
    }

    const auto sig = innovation_variance(h);
    const auto psi = psi_weights(h);
    out.variance.resize(hh);
    for (std::size_t hi = 1; hi <= hh; ++hi) {
        double v = 0.0;
        for (std::size_t j = 1; j <= hi; ++j) v += psi[hi - j] * psi[hi - j] * sig[j - 1];
        out.variance[hi - 1] = v;
    }
    return out;
}

std::vector<double> model_input(const ArimaGarchSpec& spec, std::span<const double> z) {
    if (spec.d == 0) return {z.begin(), z.end()};
    std::vector<double> w;
    if (z.size() < 2) return w;
    w.reserve(z.size() - 1);
    for (std::size_t i = 1; i < z.size(); ++i) w.push_back(z[i] - z[i - 1]);
    return w;
}

double default_presample_var(const ArimaGarchSpec& spec, std::span<const double> z_history) {
    const auto w = model_input(spec, z_history);
    if (w.empty()) throw std::invalid_argument("history too short for pre-sample variance");
    const double v = variance_of(w);
    if (!(v > 0.0)) throw std::invalid_argument("history has zero variance");
    return v;
}

namespace {

LevelForecast run_filter(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
                         std::span<const double> z_history, int h) {
    if (z_history.empty()) throw std::invalid_argument("empty forecast history");
    double v0 = 1.0;
    if (!spec.constant_variance) v0 = default_presample_var(spec, z_history);
    ArimaGarchFilter filter(spec, params, v0);
    for (double z : z_history) filter.update(z);
    return filter.forecast(h);
}

}  // namespace

std::vector<double> forecast_mean(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
                                  std::span<const double> z_history, int h) {
    return run_filter(spec, params, z_history, h).mean;
}

std::vector<double> forecast_variance(const ArimaGarchSpec& spec, const ArimaGarchParams& params,
                                      std::span<const double> z_history, int h) {
    return run_filter(spec, params, z_history, h).variance;
}

std::vector<LogisticNormal> forecast_density(const ArimaGarchSpec& spec,
                                             const ArimaGarchParams& params,
                                             std::span<const double> z_history, int h) {
    const auto f = run_filter(spec, params, z_history, h);
    std::vector<LogisticNormal> out;
    out.reserve(f.mean.size());
    for (std::size_t j = 0; j < f.mean.size(); ++j) out.emplace_back(f.mean[j], f.variance[j]);
    return out;
}

}  // namespace windcast
