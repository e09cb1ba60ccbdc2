#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace windcast {

/// Default clamp applied to normalized values so the logistic map stays finite.
inline constexpr double kDefaultClampEps = 1e-6;

/**
 * Fixed-cadence observation vector on (0,1).
 *
 * Values are normalized power (raw MW divided by capacity) and clamped into
 * [clamp_eps, 1 - clamp_eps]. Immutable after construction.
 */
class PowerSeries {
public:
    PowerSeries(std::vector<double> values, int cadence_minutes, double capacity,
                std::int64_t start_index = 0);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    int cadence_minutes() const { return cadence_minutes_; }
    double capacity() const { return capacity_; }
    std::int64_t start_index() const { return start_index_; }

    /// Contiguous sub-series [begin, begin + len).
    PowerSeries slice(std::size_t begin, std::size_t len) const;

private:
    std::vector<double> values_;
    int cadence_minutes_;
    double capacity_;
    std::int64_t start_index_;
};

struct SplitSpec {
    std::size_t train_len = 0;
    std::size_t test_len = 0;

    /// Throws std::invalid_argument unless both parts are positive and fit in `n`.
    void validate(std::size_t n) const;
};

struct HarmonicFit {
    int n_harmonics = 0;
    double base_period_steps = 0.0;
    /// [intercept, sin_1, cos_1, ..., sin_K, cos_K]
    std::vector<double> coefficients;
    double r_squared = 0.0;
    /// Numerical rank of the design; less than 2K+1 means the fit is rank deficient.
    int rank = 0;
    bool rank_deficient = false;
};

/// raw / capacity, clamped into [clamp_eps, 1 - clamp_eps].
std::vector<double> normalize_values(std::span<const double> raw, double capacity,
                                     double clamp_eps = kDefaultClampEps);

/// normalize_values wrapped as a PowerSeries (at least two observations).
PowerSeries normalize(std::span<const double> raw, double capacity,
                      double clamp_eps = kDefaultClampEps, int cadence_minutes = 15);

/// d-th order differences of x; output length is x.size() - d.
std::vector<double> difference(std::span<const double> x, int d = 1);
inline std::vector<double> difference(const PowerSeries& s, int d = 1) {
    return difference(s.values(), d);
}

/// Biased sample autocorrelation (lag-0 denominator), lags 0..max_lag.
std::vector<double> sample_acf(std::span<const double> x, int max_lag);

/// Least-squares regression on an intercept plus K sine/cosine pairs.
HarmonicFit fit_harmonics(std::span<const double> values, int n_harmonics,
                          double base_period_steps);
inline HarmonicFit fit_harmonics(const PowerSeries& s, int n_harmonics,
                                 double base_period_steps) {
    return fit_harmonics(s.values(), n_harmonics, base_period_steps);
}

}  // namespace windcast
