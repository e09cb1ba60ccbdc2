#include "windcast/scoring.hpp"

#include "windcast/benchmarks.hpp"
#include "windcast/simd/kernels.hpp"
#include "windcast/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windcast {

namespace {

double sorted_sum(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

void require_obs(double y) {
    if (!(y > 0.0 && y < 1.0)) throw std::domain_error("observation must lie in (0,1)");
}

}  // namespace

double point_forecast(const DensityForecast& d) { return density_mean(d); }

double mae(std::span<const double> errors) {
    if (errors.empty()) throw std::invalid_argument("mae of empty input");
    std::vector<double> a(errors.size());
    std::transform(errors.begin(), errors.end(), a.begin(), [](double e) { return std::abs(e); });
    return sorted_sum(std::move(a)) / static_cast<double>(errors.size());
}

double rmse(std::span<const double> errors) {
    if (errors.empty()) throw std::invalid_argument("rmse of empty input");
    std::vector<double> a(errors.size());
    std::transform(errors.begin(), errors.end(), a.begin(), [](double e) { return e * e; });
    return std::sqrt(sorted_sum(std::move(a)) / static_cast<double>(errors.size()));
}

CrpsEvaluator::CrpsEvaluator(std::size_t m) : grid_(m) {}

double CrpsEvaluator::operator()(const DensityForecast& d, double y_obs) const {
    require_obs(y_obs);
    std::vector<double> cdf(grid_.size());
    density_cdf_on_grid(d, grid_, cdf);
    return from_cdf(cdf, y_obs);
}

double CrpsEvaluator::from_cdf(std::span<const double> cdf, double y_obs) const {
    if (cdf.size() != grid_.size()) throw std::invalid_argument("crps: cdf size mismatch");
    return simd::crps_trapezoid(grid_.points(), cdf, y_obs);
}

double crps(const DensityForecast& d, double y_obs, std::size_t m) {
    return CrpsEvaluator(m)(d, y_obs);
}

NllResult nll(const DensityForecast& d, double y_obs) {
    require_obs(y_obs);
    const double lp = density_log_pdf(d, y_obs);
    constexpr double kLogFloor = -690.77552789821368;  // log(1e-300)
    if (!(lp >= kLogFloor)) return {-kLogFloor, true};
    return {-lp, false};
}

double pit(const DensityForecast& d, double y_obs) {
    require_obs(y_obs);
    return density_cdf(d, y_obs);
}

PitDiagnostics pit_deviations(std::span<const double> pit_values) {
    if (pit_values.empty()) throw std::invalid_argument("pit_deviations: empty input");
    PitDiagnostics out;
    out.pit_values.assign(pit_values.begin(), pit_values.end());
    std::size_t below5 = 0;
    std::size_t below50 = 0;
    std::size_t below95 = 0;
    for (double u : pit_values) {
        if (u < 0.05) ++below5;
        if (u < 0.5) ++below50;
        if (u < 0.95) ++below95;
        const auto bin = std::min<std::size_t>(19, static_cast<std::size_t>(std::max(0.0, u) * 20.0));
        ++out.histogram_20bins[bin];
    }
    const double n = static_cast<double>(pit_values.size());
    out.p5 = 100.0 * static_cast<double>(below5) / n;
    out.p50 = 100.0 * static_cast<double>(below50) / n;
    out.p95 = 100.0 * static_cast<double>(below95) / n;
    out.dev5 = out.p5 - 5.0;
    out.dev50 = out.p50 - 50.0;
    out.dev95 = out.p95 - 95.0;
    out.ks_stat = ks_statistic_uniform(pit_values);
    out.ks_pvalue = ks_pvalue(out.ks_stat, pit_values.size());
    return out;
}

std::vector<double> realized_variance(std::span<const double> history, int n_window) {
    if (n_window < 1) throw std::invalid_argument("realized variance window must be positive");
    const auto n = static_cast<std::size_t>(n_window);
    if (history.size() <= n) throw std::invalid_argument("realized variance: history too short");
    std::vector<double> out;
    out.reserve(history.size() - n);
    for (std::size_t t = n; t < history.size(); ++t) {
        out.push_back(persistence_variance(history.first(t + 1), n_window));
    }
    return out;
}

ConditionalPit conditional_pit_top_decile(std::span<const double> pit_values,
                                          std::span<const double> variances) {
    if (pit_values.size() != variances.size()) {
        throw std::invalid_argument("conditional PIT: lengths differ");
    }
    if (pit_values.empty()) throw std::invalid_argument("conditional PIT: empty input");
    const std::size_t n = variances.size();
    const auto k = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(n)));
    std::vector<double> sorted(variances.begin(), variances.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     sorted.end(), std::greater<>());
    ConditionalPit out;
    out.threshold = sorted[k - 1];
    std::vector<double> chosen;
    for (std::size_t i = 0; i < n; ++i) {
        if (variances[i] >= out.threshold) chosen.push_back(pit_values[i]);
    }
    out.n_selected = chosen.size();
    out.low_power = chosen.size() < 50;
    out.diagnostics = pit_deviations(chosen);
    return out;
}

ScoreReport summarize(int horizon, std::span<const double> errors, std::span<const double> crps,
                      std::span<const double> nll) {
    if (errors.empty() || errors.size() != crps.size() || errors.size() != nll.size()) {
        throw std::invalid_argument("summarize: inputs must be nonempty and aligned");
    }
    ScoreReport r;
    r.horizon = horizon;
    r.n = static_cast<int>(errors.size());
    r.mae = mae(errors);
    r.rmse = rmse(errors);
    const double n = static_cast<double>(errors.size());
    r.mean_crps = sorted_sum({crps.begin(), crps.end()}) / n;
    r.mean_nll = sorted_sum({nll.begin(), nll.end()}) / n;
    return r;
}

}  // namespace windcast
