#include "windcast/benchmarks.hpp"

#include "windcast/normal.hpp"
#include "windcast/optimize.hpp"
#include "windcast/parallel.hpp"
#include "windcast/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace windcast {

double persistence_variance(std::span<const double> history, int n_window) {
    if (n_window < 1) throw std::invalid_argument("persistence window must be positive");
    const auto n = static_cast<std::size_t>(n_window);
    if (history.size() <= n) {
        throw std::invalid_argument("persistence needs more than " + std::to_string(n) +
                                    " observations");
    }
    const std::size_t t = history.size() - 1;
    double sum = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        const double d = history[t + 1 - j] - history[t - j];
        sum += d * d;
    }
    return sum / static_cast<double>(n);
}

TruncNorm persistence_forecast(std::span<const double> history, int n_window) {
    const double v = persistence_variance(history, n_window);
    return TruncNorm(history.back(), std::max(v, kPersistenceFloor));
}

TruncNorm constant_forecast(std::span<const double> train) {
    if (train.size() < 2) throw std::invalid_argument("constant forecast needs 2 observations");
    const double n = static_cast<double>(train.size());
    const double mean = std::accumulate(train.begin(), train.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : train) ss += (v - mean) * (v - mean);
    return TruncNorm(mean, std::max(ss / (n - 1.0), kPersistenceFloor));
}

namespace {

double quantile_type7(std::vector<double>& x, double p) {
    const double pos = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(lo), x.end());
    const double a = x[lo];
    if (lo + 1 >= x.size()) return a;
    const double b = *std::min_element(x.begin() + static_cast<std::ptrdiff_t>(lo) + 1, x.end());
    return a + (pos - static_cast<double>(lo)) * (b - a);
}

GriddedDensity kde_reflect(std::span<const double> x, std::size_t m) {
    const double dx = 1.0 / static_cast<double>(m - 1);
    const double h = std::max(silverman_bandwidth(x), dx);
    const auto half = static_cast<std::ptrdiff_t>(
        std::min<double>(static_cast<double>(m - 1), std::ceil(6.0 * h / dx)));
    const auto last = static_cast<std::ptrdiff_t>(m - 1);

    // Linear binning onto the nodes, then mirror the counts about 0 and 1 into
    // an extended index range [-half, last + half].
    std::vector<double> counts(m, 0.0);
    for (double v : x) {
        const double pos = std::clamp(v, 0.0, 1.0) / dx;
        const auto k = std::min(static_cast<std::size_t>(pos), m - 2);
        const double frac = pos - static_cast<double>(k);
        counts[k] += 1.0 - frac;
        counts[k + 1] += frac;
    }
    std::vector<double> ext(m + 2 * static_cast<std::size_t>(half), 0.0);
    auto add = [&](std::ptrdiff_t idx, double c) {
        if (idx >= -half && idx <= last + half) ext[static_cast<std::size_t>(idx + half)] += c;
    };
    for (std::ptrdiff_t j = 0; j <= last; ++j) {
        const double c = counts[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        add(j, c);
        add(-j, c);
        add(2 * last - j, c);
    }

    std::vector<double> kernel(2 * static_cast<std::size_t>(half) + 1);
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
        kernel[static_cast<std::size_t>(k + half)] = normal_pdf(static_cast<double>(k) * dx / h);
    }
    std::vector<double> pdf(m);
    simd::correlate(ext, kernel, pdf);
    const double scale = 1.0 / (static_cast<double>(x.size()) * h);
    for (double& v : pdf) v = std::max(v * scale, 0.0);
    return GriddedDensity(std::move(pdf));
}

GriddedDensity histogram_density(std::span<const double> x, std::size_t m, int bins) {
    if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
    std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
    for (double v : x) {
        const auto b = std::min(static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) * bins),
                                static_cast<std::size_t>(bins - 1));
        counts[b] += 1.0;
    }
    std::vector<double> pdf(m);
    const double dx = 1.0 / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
        const auto b = std::min(static_cast<std::size_t>(static_cast<double>(i) * dx * bins),
                                static_cast<std::size_t>(bins - 1));
        pdf[i] = counts[b];
    }
    return GriddedDensity(std::move(pdf));
}

}  // namespace

double silverman_bandwidth(std::span<const double> x) {
    if (x.size() < 2) throw std::invalid_argument("bandwidth needs at least 2 points");
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    std::vector<double> tmp(x.begin(), x.end());
    const double q3 = quantile_type7(tmp, 0.75);
    const double q1 = quantile_type7(tmp, 0.25);
    const double iqr = (q3 - q1) / 1.34;
    const double spread = (sd > 0.0 && iqr > 0.0) ? std::min(sd, iqr) : std::max(sd, iqr);
    return 0.9 * spread * std::pow(n, -0.2);
}

GriddedDensity fit_empirical(std::span<const double> window, const EmpiricalOptions& options) {
    if (window.size() < static_cast<std::size_t>(kDayLength)) {
        throw std::invalid_argument("fit_empirical: window shorter than 96 observations");
    }
    if (options.m < 3) throw std::invalid_argument("fit_empirical: grid needs at least 3 nodes");
    if (options.estimator == EmpiricalEstimator::histogram) {
        return histogram_density(window, options.m, options.histogram_bins);
    }
    return kde_reflect(window, options.m);
}

std::vector<double> ewma_weights(double lambda, int j_max) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
    if (j_max < 1) throw std::invalid_argument("j_max must be positive");
    std::vector<double> w(static_cast<std::size_t>(j_max));
    double v = lambda;
    for (auto& x : w) {
        x = v;
        v *= 1.0 - lambda;
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= total;
    return w;
}

GriddedDensity EwmaMixture::combined() const { return GriddedDensity::mixture(components, weights); }

namespace {

std::vector<GriddedDensity> window_components(std::span<const double> history,
                                              const EmpiricalOptions& options, int window,
                                              int j_max) {
    const auto need = static_cast<std::size_t>(window) * static_cast<std::size_t>(j_max);
    if (window < kDayLength || j_max < 1) throw std::invalid_argument("invalid EWMA windows");
    if (history.size() < need) {
        throw std::invalid_argument("EWMA density needs " + std::to_string(need) +
                                    " observations of history");
    }
    std::vector<GriddedDensity> parts;
    parts.reserve(static_cast<std::size_t>(j_max));
    for (int j = 1; j <= j_max; ++j) {
        const auto len = static_cast<std::size_t>(window) * static_cast<std::size_t>(j);
        parts.push_back(fit_empirical(history.last(len), options));
    }
    return parts;
}

}  // namespace

EwmaMixture ewma_mixture(std::span<const double> history, double lambda,
                         const EmpiricalOptions& options, int window, int j_max) {
    EwmaMixture mix;
    mix.lambda = lambda;
    mix.j_max = j_max;
    mix.weights = ewma_weights(lambda, j_max);
    mix.components = window_components(history, options, window, j_max);
    return mix;
}

LambdaFit fit_lambda(std::span<const double> train, const EmpiricalOptions& options, int window,
                     int j_max) {
    const auto first = static_cast<std::size_t>(window) * static_cast<std::size_t>(j_max);
    if (train.size() < first + static_cast<std::size_t>(window)) {
        throw std::invalid_argument("fit_lambda: training series too short");
    }
    // Component densities at the next observation, for every origin.
    const std::size_t n_origins = train.size() - first;
    const auto jm = static_cast<std::size_t>(j_max);
    std::vector<double> values(n_origins * jm);
    parallel_for(n_origins, [&](std::size_t k) {
        const std::size_t t = first - 1 + k;
        const auto parts = window_components(train.first(t + 1), options, window, j_max);
        for (std::size_t j = 0; j < jm; ++j) values[k * jm + j] = parts[j].pdf(train[t + 1]);
    });

    auto objective = [&](double lambda) {
        const auto w = ewma_weights(lambda, j_max);
        double ll = 0.0;
        for (std::size_t k = 0; k < n_origins; ++k) {
            double f = 0.0;
            for (std::size_t j = 0; j < jm; ++j) f += w[j] * values[k * jm + j];
            ll += std::log(std::max(f, 1e-300));
        }
        return ll;
    };
    const auto res = opt::golden_section_max(objective, 0.01, 0.99, 1e-6);
    LambdaFit fit;
    fit.lambda = res.argmax;
    fit.loglik = res.value;
    fit.evaluations = res.evaluations;
    fit.n_terms = static_cast<int>(n_origins);
    fit.flat = (res.value - res.min_seen) < 1e-3 * static_cast<double>(n_origins);
    return fit;
}

}  // namespace windcast
