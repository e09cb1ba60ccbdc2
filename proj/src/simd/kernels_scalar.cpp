#include "windcast/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace windcast::simd::detail {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void normal_cdf_affine(const double* x, std::size_t n, double scale, double shift, double* out) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.5 * std::erfc(-(scale * x[i] + shift) * kInvSqrt2);
    }
}

double crps_trapezoid(const double* grid, const double* cdf, std::size_t n, double obs) {
    if (n < 2) return 0.0;
    obs = std::clamp(obs, grid[0], grid[n - 1]);
    // k: last index with grid[k] <= obs, capped so [k, k+1] is a valid cell.
    std::size_t k = static_cast<std::size_t>(std::upper_bound(grid, grid + n, obs) - grid);
    k = k == 0 ? 0 : k - 1;
    if (k >= n - 1) k = n - 2;

    double left = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        left += 0.5 * (cdf[i] * cdf[i] + cdf[i + 1] * cdf[i + 1]) * (grid[i + 1] - grid[i]);
    }
    double right = 0.0;
    for (std::size_t i = k + 1; i + 1 < n; ++i) {
        const double a = 1.0 - cdf[i];
        const double b = 1.0 - cdf[i + 1];
        right += 0.5 * (a * a + b * b) * (grid[i + 1] - grid[i]);
    }
    const double h = grid[k + 1] - grid[k];
    const double w = h > 0.0 ? (obs - grid[k]) / h : 0.0;
    const double f_obs = cdf[k] + w * (cdf[k + 1] - cdf[k]);
    const double lo = 0.5 * (cdf[k] * cdf[k] + f_obs * f_obs) * (obs - grid[k]);
    const double a = 1.0 - f_obs;
    const double b = 1.0 - cdf[k + 1];
    const double hi = 0.5 * (a * a + b * b) * (grid[k + 1] - obs);
    return left + lo + hi + right;
}

void correlate(const double* signal, std::size_t n_out, const double* kernel, std::size_t k_len,
               double* out) {
    for (std::size_t i = 0; i < n_out; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < k_len; ++k) s += kernel[k] * signal[i + k];
        out[i] = s;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable t{&normal_cdf_affine, &crps_trapezoid, &correlate};
    return t;
}

}  // namespace windcast::simd::detail
