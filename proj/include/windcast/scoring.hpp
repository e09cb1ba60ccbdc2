#pragma once

#include "windcast/density.hpp"

#include <array>
#include <span>
#include <vector>

namespace windcast {

inline constexpr std::size_t kCrpsGridSize = 2048;
inline constexpr double kNllPdfFloor = 1e-300;

struct ScoreReport {
    int horizon = 0;
    double mae = 0.0;
    double rmse = 0.0;
    double mean_crps = 0.0;
    double mean_nll = 0.0;
    int n = 0;
};

struct PitDiagnostics {
    std::vector<double> pit_values;
    double p5 = 0.0;
    double p50 = 0.0;
    double p95 = 0.0;
    double dev5 = 0.0;
    double dev50 = 0.0;
    double dev95 = 0.0;
    std::array<int, 20> histogram_20bins{};
    double ks_stat = 0.0;
    double ks_pvalue = 1.0;
};

/// Mean of the forecast density.
double point_forecast(const DensityForecast& d);

double mae(std::span<const double> errors);
double rmse(std::span<const double> errors);

/**
 * CRPS by trapezoid quadrature of (F(y) - 1{y >= obs})^2 on an equally spaced
 * grid over [0,1], with the observation inserted as a breakpoint.
 */
class CrpsEvaluator {
public:
    explicit CrpsEvaluator(std::size_t m = kCrpsGridSize);

    const EvalGrid& grid() const { return grid_; }
    double operator()(const DensityForecast& d, double y_obs) const;
    /// Scores against a cdf already tabulated on grid().
    double from_cdf(std::span<const double> cdf, double y_obs) const;

private:
    EvalGrid grid_;
};

double crps(const DensityForecast& d, double y_obs, std::size_t m = kCrpsGridSize);

struct NllResult {
    double value = 0.0;
    bool clamped = false;  // pdf fell below 1e-300
};
NllResult nll(const DensityForecast& d, double y_obs);

double pit(const DensityForecast& d, double y_obs);

/// Percent of PIT values below 0.05/0.5/0.95, deviations, 20-bin histogram, KS vs U[0,1].
PitDiagnostics pit_deviations(std::span<const double> pit_values);

/// Element k is the realized variance at origin t = N + k of `history`.
std::vector<double> realized_variance(std::span<const double> history, int n_window = 48);

struct ConditionalPit {
    PitDiagnostics diagnostics;
    std::size_t n_selected = 0;
    double threshold = 0.0;
    bool low_power = false;  // fewer than 50 points selected
};

/// PIT diagnostics over the origins whose variance is at or above the
/// ceil(0.1 n)-th largest value (ties are included).
ConditionalPit conditional_pit_top_decile(std::span<const double> pit_values,
                                          std::span<const double> variances);

/// Per-horizon aggregation over origins; sums are taken in sorted order so the
/// result does not depend on origin order.
ScoreReport summarize(int horizon, std::span<const double> errors, std::span<const double> crps,
                      std::span<const double> nll);

}  // namespace windcast
