#pragma once

#include "windcast/density.hpp"

#include <span>
#include <vector>

namespace windcast {

inline constexpr int kPersistenceWindow = 48;
inline constexpr double kPersistenceFloor = 1e-10;
inline constexpr int kDayLength = 96;
inline constexpr int kEwmaWindows = 14;
inline constexpr double kDefaultEwmaLambda = 0.1988;

/// sum_{j=1}^N (y_{t+1-j} - y_{t-j})^2 / N at the last point of `history`.
double persistence_variance(std::span<const double> history, int n_window = kPersistenceWindow);

/// TruncNorm(y_t, max(variance, 1e-10)); the same density for every horizon.
TruncNorm persistence_forecast(std::span<const double> history,
                               int n_window = kPersistenceWindow);

/// TruncNorm(sample mean, unbiased sample variance) of the training data.
TruncNorm constant_forecast(std::span<const double> train);

enum class EmpiricalEstimator { kde_reflect, histogram };

struct EmpiricalOptions {
    std::size_t m = 512;
    EmpiricalEstimator estimator = EmpiricalEstimator::kde_reflect;
    int histogram_bins = 50;
};

/// 0.9 min(sd, IQR / 1.34) n^(-1/5).
double silverman_bandwidth(std::span<const double> x);

/// Gaussian-kernel density with reflection at 0 and 1 (or a histogram),
/// tabulated on m nodes and renormalized.
GriddedDensity fit_empirical(std::span<const double> window, const EmpiricalOptions& options = {});

/// lambda (1 - lambda)^(j-1), j = 1..j_max, renormalized to sum to 1.
std::vector<double> ewma_weights(double lambda, int j_max = kEwmaWindows);

struct EwmaMixture {
    double lambda = kDefaultEwmaLambda;
    int j_max = kEwmaWindows;
    std::vector<GriddedDensity> components;  // component j-1 uses the last 96 j points
    std::vector<double> weights;

    GriddedDensity combined() const;
};

EwmaMixture ewma_mixture(std::span<const double> history, double lambda,
                         const EmpiricalOptions& options = {}, int window = kDayLength,
                         int j_max = kEwmaWindows);

inline GriddedDensity ewma_density_forecast(std::span<const double> history, double lambda,
                                            const EmpiricalOptions& options = {}) {
    return ewma_mixture(history, lambda, options).combined();
}

struct LambdaFit {
    double lambda = kDefaultEwmaLambda;
    double loglik = 0.0;
    /// Likelihood varied by less than 1e-6 (relative) over the search interval.
    bool flat = false;
    int evaluations = 0;
    int n_terms = 0;
};

/// Golden-section maximization of sum_t log f_{t+1|t}(y_{t+1}) over (0.01, 0.99).
LambdaFit fit_lambda(std::span<const double> train, const EmpiricalOptions& options = {},
                     int window = kDayLength, int j_max = kEwmaWindows);

}  // namespace windcast
