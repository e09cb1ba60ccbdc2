#include "windcast/series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace windcast {

PowerSeries::PowerSeries(std::vector<double> values, int cadence_minutes, double capacity,
                         std::int64_t start_index)
    : values_(std::move(values)),
      cadence_minutes_(cadence_minutes),
      capacity_(capacity),
      start_index_(start_index) {
    if (values_.size() < 2) {
        throw std::invalid_argument("PowerSeries needs at least 2 observations");
    }
    if (cadence_minutes_ <= 0) {
        throw std::invalid_argument("cadence must be positive");
    }
    if (!(capacity_ > 0.0)) {
        throw std::invalid_argument("capacity must be positive");
    }
    for (double v : values_) {
        if (!(v > 0.0 && v < 1.0)) {
            throw std::invalid_argument("PowerSeries values must lie strictly in (0,1), got " +
                                        std::to_string(v));
        }
    }
}

PowerSeries PowerSeries::slice(std::size_t begin, std::size_t len) const {
    if (begin + len > values_.size()) {
        throw std::out_of_range("slice exceeds series length");
    }
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                          values_.begin() + static_cast<std::ptrdiff_t>(begin + len));
    return PowerSeries(std::move(v), cadence_minutes_, capacity_,
                       start_index_ + static_cast<std::int64_t>(begin));
}

void SplitSpec::validate(std::size_t n) const {
    if (train_len == 0 || test_len == 0) {
        throw std::invalid_argument("train_len and test_len must be positive");
    }
    if (train_len + test_len > n) {
        throw std::invalid_argument("split (" + std::to_string(train_len) + "+" +
                                    std::to_string(test_len) + ") exceeds series length " +
                                    std::to_string(n));
    }
}

std::vector<double> normalize_values(std::span<const double> raw, double capacity,
                                     double clamp_eps) {
    if (raw.empty()) throw std::invalid_argument("normalize: empty input");
    if (!(capacity > 0.0)) throw std::invalid_argument("normalize: capacity must be positive");
    if (!(clamp_eps > 0.0 && clamp_eps <= 1e-3)) {
        throw std::invalid_argument("normalize: clamp_eps must lie in (0, 1e-3]");
    }
    std::vector<double> out;
    out.reserve(raw.size());
    for (double r : raw) {
        if (!std::isfinite(r)) throw std::invalid_argument("normalize: non-finite value");
        if (r < 0.0) throw std::invalid_argument("normalize: negative power value");
        if (r > capacity) {
            throw std::invalid_argument("normalize: value " + std::to_string(r) +
                                        " exceeds capacity " + std::to_string(capacity));
        }
        out.push_back(std::clamp(r / capacity, clamp_eps, 1.0 - clamp_eps));
    }
    return out;
}

PowerSeries normalize(std::span<const double> raw, double capacity, double clamp_eps,
                      int cadence_minutes) {
    return PowerSeries(normalize_values(raw, capacity, clamp_eps), cadence_minutes, capacity);
}

std::vector<double> difference(std::span<const double> x, int d) {
    if (d < 1) throw std::invalid_argument("difference: order must be positive");
    if (static_cast<std::size_t>(d) >= x.size()) {
        throw std::invalid_argument("difference: order must be smaller than series length");
    }
    std::vector<double> cur(x.begin(), x.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = cur[i + 1] - cur[i];
        cur.pop_back();
    }
    return cur;
}

std::vector<double> sample_acf(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
        throw std::invalid_argument("sample_acf: max_lag must be below series length");
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = x[i] - mean;
    double c0 = 0.0;
    for (double v : c) c0 += v * v;
    if (!(c0 > 0.0)) throw std::invalid_argument("sample_acf: zero-variance series");

    std::vector<double> acf(static_cast<std::size_t>(max_lag) + 1);
    acf[0] = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(k) < n; ++t) {
            s += c[t] * c[t + static_cast<std::size_t>(k)];
        }
        acf[static_cast<std::size_t>(k)] = s / c0;
    }
    return acf;
}

HarmonicFit fit_harmonics(std::span<const double> values, int n_harmonics,
                          double base_period_steps) {
    const auto n = static_cast<Eigen::Index>(values.size());
    if (n_harmonics < 1) throw std::invalid_argument("fit_harmonics: need at least one harmonic");
    if (!(base_period_steps > 0.0)) {
        throw std::invalid_argument("fit_harmonics: base period must be positive");
    }
    const Eigen::Index cols = 2 * n_harmonics + 1;
    if (cols >= n) throw std::invalid_argument("fit_harmonics: too many harmonics for sample");

    Eigen::MatrixXd design(n, cols);
    Eigen::VectorXd y(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        y(t) = values[static_cast<std::size_t>(t)];
        design(t, 0) = 1.0;
        for (int j = 1; j <= n_harmonics; ++j) {
            const double arg = 2.0 * std::numbers::pi * j * static_cast<double>(t) /
                               base_period_steps;
            design(t, 2 * j - 1) = std::sin(arg);
            design(t, 2 * j) = std::cos(arg);
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    HarmonicFit fit;
    fit.n_harmonics = n_harmonics;
    fit.base_period_steps = base_period_steps;
    fit.rank = static_cast<int>(qr.rank());
    fit.rank_deficient = qr.rank() < cols;
    const Eigen::VectorXd beta = qr.solve(y);
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());

    const double mean = y.mean();
    const double sst = (y.array() - mean).square().sum();
    const double sse = (y - design * beta).squaredNorm();
    fit.r_squared = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 0.0;
    return fit;
}

}  // namespace windcast
