#include "windcast/backtest.hpp"

#include "windcast/forecasters.hpp"
#include "windcast/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace windcast {

using nlohmann::json;

void BacktestConfig::validate(std::size_t series_len) const {
    if (forecasters.empty()) throw std::invalid_argument("backtest: no forecasters configured");
    if (horizon < 1) throw std::invalid_argument("backtest: horizon must be >= 1");
    split.validate(series_len);
    if (split.train_len < 2) throw std::invalid_argument("backtest: train_len must be >= 2");
    for (const auto& id : forecasters) {
        const auto& ids = forecaster_ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            throw std::invalid_argument("backtest: unknown forecaster id: " + id);
        }
    }
}

BacktestConfig config_from_json(const json& j) {
    BacktestConfig c;
    c.forecasters = j.at("forecasters").get<std::vector<std::string>>();
    const auto& split = j.at("split");
    c.split.train_len = split.at("train_len").get<std::size_t>();
    c.split.test_len = split.at("test_len").get<std::size_t>();
    c.horizon = j.value("horizon", 96);
    if (j.contains("refit_interval") && !j["refit_interval"].is_null()) {
        const auto& r = j["refit_interval"];
        if (r.is_string()) {
            if (r.get<std::string>() != "never") {
                throw std::invalid_argument("refit_interval must be an integer or \"never\"");
            }
        } else {
            c.refit_interval = r.get<std::size_t>();
        }
    }
    c.seed = j.value("seed", std::uint64_t{1});
    c.clamp_eps = j.value("clamp_eps", kDefaultClampEps);
    if (j.contains("options")) c.options = j["options"];
    if (!c.options.is_object()) throw std::invalid_argument("options must be an object");
    c.dump_forecasts = j.value("dump_forecasts", false);
    return c;
}

json to_json(const BacktestConfig& c) {
    json j = {{"forecasters", c.forecasters},
              {"split", {{"train_len", c.split.train_len}, {"test_len", c.split.test_len}}},
              {"horizon", c.horizon},
              {"seed", c.seed},
              {"clamp_eps", c.clamp_eps},
              {"options", c.options},
              {"dump_forecasts", c.dump_forecasts}};
    if (c.refit_interval == 0) {
        j["refit_interval"] = "never";
    } else {
        j["refit_interval"] = c.refit_interval;
    }
    return j;
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

HorizonResult aggregate(int horizon, const HorizonCells& cells) {
    const std::size_t n = cells.obs.size();
    if (n == 0) throw std::invalid_argument("aggregate: no cells");
    std::vector<double> errors(n);
    for (std::size_t i = 0; i < n; ++i) errors[i] = cells.obs[i] - cells.point[i];
    HorizonResult r;
    r.scores = summarize(horizon, errors, cells.crps, cells.nll);
    r.pit = pit_deviations(cells.pit);
    constexpr double kClampedNll = 690.77552789821368;
    r.nll_clamped = static_cast<int>(
        std::count_if(cells.nll.begin(), cells.nll.end(), [](double v) { return v >= kClampedNll; }));
    return r;
}

namespace {

constexpr std::size_t kChunk = 256;

struct Pending {
    std::size_t origin = 0;
    std::vector<DensityForecast> densities;
};

class Scorer {
public:
    Scorer(std::span<const double> y, std::size_t first, std::size_t end, int horizon,
           bool invariant)
        : y_(y), first_(first), end_(end), horizon_(horizon), invariant_(invariant),
          cells_(static_cast<std::size_t>(horizon)) {
        for (int h = 1; h <= horizon; ++h) {
            const std::size_t n = end >= first + static_cast<std::size_t>(h)
                                      ? end - first - static_cast<std::size_t>(h) + 1
                                      : 0;
            auto& c = cells_[static_cast<std::size_t>(h - 1)];
            c.origin.resize(n);
            c.obs.resize(n);
            c.point.resize(n);
            c.crps.resize(n);
            c.nll.resize(n);
            c.pit.resize(n);
        }
    }

    void push(std::size_t origin, std::span<const DensityForecast> d) {
        pending_.push_back({origin, {d.begin(), d.end()}});
        if (pending_.size() == kChunk) flush();
    }

    void flush() {
        parallel_for(pending_.size(), [this](std::size_t i) { score(pending_[i]); });
        pending_.clear();
    }

    std::vector<HorizonCells> take() { return std::move(cells_); }

private:
    void score(const Pending& p) const {
        const std::size_t t = p.origin;
        std::vector<double> cdf;
        double point = 0.0;
        if (invariant_) {
            cdf.resize(evaluator_.grid().size());
            density_cdf_on_grid(p.densities.front(), evaluator_.grid(), cdf);
            point = point_forecast(p.densities.front());
        }
        for (int h = 1; h <= horizon_; ++h) {
            const std::size_t target = t + static_cast<std::size_t>(h);
            if (target > end_) break;
            const auto& d = invariant_ ? p.densities.front()
                                       : p.densities.at(static_cast<std::size_t>(h - 1));
            const double obs = y_[target];
            auto& c = cells_[static_cast<std::size_t>(h - 1)];
            const std::size_t k = t - first_;
            c.origin[k] = t;
            c.obs[k] = obs;
            c.point[k] = invariant_ ? point : point_forecast(d);
            c.crps[k] = invariant_ ? evaluator_.from_cdf(cdf, obs) : evaluator_(d, obs);
            c.nll[k] = nll(d, obs).value;
            c.pit[k] = pit(d, obs);
        }
    }

    std::span<const double> y_;
    std::size_t first_;
    std::size_t end_;
    int horizon_;
    bool invariant_;
    CrpsEvaluator evaluator_;
    std::vector<Pending> pending_;
    // Workers write disjoint elements of preallocated vectors.
    mutable std::vector<HorizonCells> cells_;
};

ForecasterResult evaluate(const std::string& id, const BacktestConfig& config,
                          std::span<const double> y) {
    ForecasterResult out;
    out.id = id;
    const std::size_t train_len = config.split.train_len;
    const std::size_t first = train_len - 1;
    const std::size_t end = train_len + config.split.test_len - 1;
    const std::size_t last = end - 1;
    try {
        const json options = config.options.contains(id) ? config.options[id] : json();
        auto f = make_forecaster(id, options, config.clamp_eps);
        f->fit(y.first(train_len));
        out.fit_report = f->fit_report();

        Scorer scorer(y, first, end, config.horizon, f->horizon_invariant());
        const ForecastSink sink = [&scorer](std::size_t t, std::span<const DensityForecast> d) {
            scorer.push(t, d);
        };
        const std::size_t block = config.refit_interval == 0 ? last - first + 1 : config.refit_interval;
        json refits = json::array();
        for (std::size_t b = first; b <= last; b += block) {
            if (b > first) {
                f->fit(y.subspan(b + 1 - train_len, train_len));
                refits.push_back(f->fit_report());
            }
            f->run(y, b, std::min(b + block - 1, last), config.horizon, sink);
        }
        scorer.flush();
        if (!refits.empty()) out.fit_report["refits"] = std::move(refits);

        auto cells = scorer.take();
        for (int h = 1; h <= config.horizon; ++h) {
            const auto& c = cells[static_cast<std::size_t>(h - 1)];
            if (c.obs.empty()) break;
            out.per_horizon.push_back(aggregate(h, c));
        }
        constexpr int kWindow = 48;
        if (first >= static_cast<std::size_t>(kWindow) && !cells.front().pit.empty()) {
            const auto rv = realized_variance(y.first(last + 1), kWindow);
            const auto& c1 = cells.front();
            std::vector<double> v(c1.origin.size());
            for (std::size_t k = 0; k < v.size(); ++k) v[k] = rv[c1.origin[k] - kWindow];
            out.top_decile = conditional_pit_top_decile(c1.pit, v);
        }
        if (config.dump_forecasts) out.cells = std::move(cells);
        out.ok = true;
    } catch (const std::exception& e) {
        out = ForecasterResult{};
        out.id = id;
        out.error = e.what();
    }
    return out;
}

}  // namespace

BacktestResult run_backtest(const BacktestConfig& config, std::span<const double> y) {
    config.validate(y.size());
    BacktestResult result;
    result.config = to_json(config);
    result.config_hash = config_hash(result.config);
    for (const auto& id : config.forecasters) result.forecasters.push_back(evaluate(id, config, y));
    return result;
}

}  // namespace windcast
