#pragma once

#include <span>
#include <vector>

namespace windcast {

double mean(std::span<const double> x);
/// Unbiased sample variance.
double sample_variance(std::span<const double> x);
/// Non-excess kurtosis m4 / m2^2.
double kurtosis(std::span<const double> x);

/// sup |F_n(u) - u| for a sample on [0,1].
double ks_statistic_uniform(std::span<const double> u);
/// Asymptotic Kolmogorov tail probability with Stephens' small-sample correction.
double ks_pvalue(double d, std::size_t n);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};
/// Pearson test of equal expected counts across bins.
ChiSquareResult chi_square_uniform(std::span<const double> counts);

/// Rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace windcast
