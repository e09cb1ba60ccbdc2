#include "windcast/forecasters.hpp"

#include "windcast/arima_garch.hpp"
#include "windcast/benchmarks.hpp"
#include "windcast/ets.hpp"
#include "windcast/model_io.hpp"

#include <optional>
#include <stdexcept>

namespace windcast {

using nlohmann::json;

namespace {

json options_or_empty(const json& j) { return j.is_object() ? j : json::object(); }

EmpiricalOptions empirical_options(const json& o) {
    EmpiricalOptions opt;
    opt.m = o.value("grid_size", std::size_t{512});
    const auto est = o.value("estimator", std::string("kde"));
    if (est == "kde") {
        opt.estimator = EmpiricalEstimator::kde_reflect;
    } else if (est == "histogram") {
        opt.estimator = EmpiricalEstimator::histogram;
    } else {
        throw std::invalid_argument("unknown empirical estimator: " + est);
    }
    opt.histogram_bins = o.value("histogram_bins", 50);
    return opt;
}

class PersistenceForecaster final : public Forecaster {
public:
    explicit PersistenceForecaster(const json& o) : window_(o.value("window", kPersistenceWindow)) {}

    std::string id() const override { return "persistence"; }
    bool horizon_invariant() const override { return true; }
    void fit(std::span<const double>) override {}
    json fit_report() const override { return {{"window", window_}}; }

    void run(std::span<const double> y, std::size_t first, std::size_t last, int,
             const ForecastSink& sink) const override {
        std::vector<DensityForecast> d(1);
        for (std::size_t t = first; t <= last; ++t) {
            d[0] = persistence_forecast(y.first(t + 1), window_);
            sink(t, d);
        }
    }

private:
    int window_;
};

class StaticForecaster : public Forecaster {
public:
    bool horizon_invariant() const override { return true; }

    void run(std::span<const double>, std::size_t first, std::size_t last, int,
             const ForecastSink& sink) const override {
        if (!density_) throw std::logic_error(id() + ": run before fit");
        const std::vector<DensityForecast> d{*density_};
        for (std::size_t t = first; t <= last; ++t) sink(t, d);
    }

protected:
    std::optional<DensityForecast> density_;
};

class ConstantForecaster final : public StaticForecaster {
public:
    std::string id() const override { return "constant"; }
    void fit(std::span<const double> train) override {
        const auto tn = constant_forecast(train);
        density_ = tn;
        report_ = {{"loc", tn.loc}, {"scale2", tn.scale2}, {"n_train", train.size()}};
    }
    json fit_report() const override { return report_; }

private:
    json report_;
};

class ClimatologyForecaster final : public StaticForecaster {
public:
    explicit ClimatologyForecaster(const json& o) : options_(empirical_options(o)) {}

    std::string id() const override { return "climatology"; }
    void fit(std::span<const double> train) override {
        density_ = fit_empirical(train, options_);
        report_ = {{"grid_size", options_.m},
                   {"estimator", options_.estimator == EmpiricalEstimator::kde_reflect
                                     ? "kde"
                                     : "histogram"},
                   {"n_train", train.size()}};
        if (options_.estimator == EmpiricalEstimator::kde_reflect) {
            report_["bandwidth"] = silverman_bandwidth(train);
        }
    }
    json fit_report() const override { return report_; }

private:
    EmpiricalOptions options_;
    json report_;
};

class EwmaForecaster final : public Forecaster {
public:
    explicit EwmaForecaster(const json& o) : options_(empirical_options(o)) {
        if (o.contains("lambda") && !o["lambda"].is_null()) fixed_lambda_ = o["lambda"].get<double>();
    }

    std::string id() const override { return "ewma"; }
    bool horizon_invariant() const override { return true; }

    void fit(std::span<const double> train) override {
        if (fixed_lambda_) {
            lambda_ = *fixed_lambda_;
            report_ = {{"lambda", lambda_}, {"estimated", false}};
            return;
        }
        const auto f = fit_lambda(train, options_);
        lambda_ = f.lambda;
        report_ = {{"lambda", f.lambda},
                   {"estimated", true},
                   {"loglik", f.loglik},
                   {"flat", f.flat},
                   {"n_terms", f.n_terms},
                   {"evaluations", f.evaluations}};
    }
    json fit_report() const override { return report_; }

    void run(std::span<const double> y, std::size_t first, std::size_t last, int,
             const ForecastSink& sink) const override {
        std::vector<DensityForecast> d(1);
        for (std::size_t t = first; t <= last; ++t) {
            d[0] = ewma_density_forecast(y.first(t + 1), lambda_, options_);
            sink(t, d);
        }
    }

private:
    EmpiricalOptions options_;
    std::optional<double> fixed_lambda_;
    double lambda_ = kDefaultEwmaLambda;
    json report_;
};

std::vector<double> to_logit(std::span<const double> y) {
    std::vector<double> z(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) z[i] = logistic_fwd(y[i]);
    return z;
}

class ArimaForecaster final : public Forecaster {
public:
    ArimaForecaster(const json& o, bool garch, double clamp_eps)
        : garch_(garch), clamp_eps_(clamp_eps) {
        fit_options_.n_starts = o.value("n_starts", 5);
        fit_options_.max_iter = o.value("max_iter", 5000);
        const int max_order = o.value("max_order", 4);
        const bool include_d0 = o.value("include_d0", false);
        if (o.contains("p") || o.contains("q")) {
            ArimaGarchSpec spec{o.value("p", 0), o.value("q", 0), garch ? 1 : 0, garch ? 1 : 0,
                                !garch, o.value("d", 1)};
            spec.validate();
            grid_.push_back(spec);
        } else {
            grid_ = default_grid(!garch, garch, max_order);
            if (include_d0) {
                const auto n = grid_.size();
                for (std::size_t i = 0; i < n; ++i) {
                    auto s = grid_[i];
                    s.d = 0;
                    grid_.push_back(s);
                }
            }
        }
    }

    std::string id() const override { return garch_ ? "arima_garch" : "arima"; }
    bool horizon_invariant() const override { return false; }

    void fit(std::span<const double> train) override {
        const auto z = to_logit(train);
        failures_.clear();
        n_candidates_ = 1;
        if (grid_.size() == 1) {
            model_ = windcast::fit(grid_.front(), model_input(grid_.front(), z), fit_options_);
        } else {
            // Specs with d = 0 and d = 1 see different inputs, so select within each and compare.
            std::vector<ArimaGarchSpec> g1;
            std::vector<ArimaGarchSpec> g0;
            for (const auto& s : grid_) (s.d == 1 ? g1 : g0).push_back(s);
            std::optional<ArimaGarchModel> best;
            n_candidates_ = 0;
            for (const auto* g : {&g1, &g0}) {
                if (g->empty()) continue;
                const auto sel = select_bic(*g, model_input(g->front(), z), fit_options_);
                n_candidates_ += static_cast<int>(sel.candidates.size());
                failures_.insert(failures_.end(), sel.failures.begin(), sel.failures.end());
                if (!best || sel.best.report.bic < best->report.bic) best = sel.best;
            }
            model_ = *best;
        }
        train_len_ = train.size();
    }

    json fit_report() const override {
        ModelEnvelope env{model_, clamp_eps_, {0, train_len_}};
        json j = to_json(env);
        j["label"] = model_.spec.label();
        j["n_candidates"] = n_candidates_;
        j["failures"] = failures_;
        return j;
    }

    void run(std::span<const double> y, std::size_t first, std::size_t last, int horizon,
             const ForecastSink& sink) const override {
        ArimaGarchFilter filter(model_.spec, model_.params, model_.presample_var);
        for (std::size_t t = 0; t < first; ++t) filter.update(logistic_fwd(y[t]));
        std::vector<DensityForecast> d(static_cast<std::size_t>(horizon));
        for (std::size_t t = first; t <= last; ++t) {
            filter.update(logistic_fwd(y[t]));
            const auto f = filter.forecast(horizon);
            for (std::size_t h = 0; h < d.size(); ++h) d[h] = LogisticNormal(f.mean[h], f.variance[h]);
            sink(t, d);
        }
    }

private:
    bool garch_;
    double clamp_eps_;
    ArimaGarchFitOptions fit_options_;
    std::vector<ArimaGarchSpec> grid_;
    ArimaGarchModel model_;
    std::vector<std::string> failures_;
    int n_candidates_ = 0;
    std::size_t train_len_ = 0;
};

class EtsForecaster final : public Forecaster {
public:
    EtsForecaster(const json& o, bool with_variance, double clamp_eps)
        : with_variance_(with_variance), clamp_eps_(clamp_eps) {
        options_.burn_in = o.value("burn_in", 96);
        options_.init_log_v = o.value("init_log_v", 0.0);
        options_.n_starts = o.value("n_starts", 5);
        options_.max_iter = o.value("max_iter", 5000);
        options_.g_bar_from_training = o.value("g_bar_from_training", true);
    }

    std::string id() const override { return with_variance_ ? "ets_ann_ec2" : "ets_ann_ec"; }
    bool horizon_invariant() const override { return false; }

    void fit(std::span<const double> train) override {
        model_ = fit_ets(train, with_variance_, options_);
        train_len_ = train.size();
    }

    json fit_report() const override {
        ModelEnvelope env{model_, clamp_eps_, {0, train_len_}};
        return to_json(env);
    }

    void run(std::span<const double> y, std::size_t first, std::size_t last, int horizon,
             const ForecastSink& sink) const override {
        EtsFilter filter(model_.params);
        for (std::size_t t = 0; t < first; ++t) filter.update(y[t]);
        std::vector<DensityForecast> d(static_cast<std::size_t>(horizon));
        for (std::size_t t = first; t <= last; ++t) {
            filter.update(y[t]);
            const auto f = filter.forecast(horizon);
            for (std::size_t h = 0; h < d.size(); ++h) d[h] = f[h];
            sink(t, d);
        }
    }

private:
    bool with_variance_;
    double clamp_eps_;
    EtsFitOptions options_;
    EtsModel model_;
    std::size_t train_len_ = 0;
};

}  // namespace

const std::vector<std::string>& forecaster_ids() {
    static const std::vector<std::string> ids{"persistence", "constant",    "climatology",
                                              "ewma",        "arima",       "arima_garch",
                                              "ets_ann_ec",  "ets_ann_ec2"};
    return ids;
}

std::unique_ptr<Forecaster> make_forecaster(const std::string& id, const json& options,
                                            double clamp_eps) {
    const json o = options_or_empty(options);
    if (id == "persistence") return std::make_unique<PersistenceForecaster>(o);
    if (id == "constant") return std::make_unique<ConstantForecaster>();
    if (id == "climatology") return std::make_unique<ClimatologyForecaster>(o);
    if (id == "ewma") return std::make_unique<EwmaForecaster>(o);
    if (id == "arima") return std::make_unique<ArimaForecaster>(o, false, clamp_eps);
    if (id == "arima_garch") return std::make_unique<ArimaForecaster>(o, true, clamp_eps);
    if (id == "ets_ann_ec") return std::make_unique<EtsForecaster>(o, false, clamp_eps);
    if (id == "ets_ann_ec2") return std::make_unique<EtsForecaster>(o, true, clamp_eps);
    throw std::invalid_argument("unknown forecaster id: " + id);
}

}  // namespace windcast
