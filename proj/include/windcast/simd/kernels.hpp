#pragma once

// Data-parallel inner loops used by density evaluation, scoring and kernel
// density estimation. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2+FMA variant. The active backend is chosen once at
// startup from CPUID; WINDCAST_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace windcast::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
    /// out[i] = Phi(scale * x[i] + shift)
    void (*normal_cdf_affine)(const double* x, std::size_t n, double scale, double shift,
                              double* out);
    /// Trapezoid integral of (F(y) - 1{y >= obs})^2 over an increasing grid, with obs
    /// inserted as a breakpoint and F linearly interpolated there.
    double (*crps_trapezoid)(const double* grid, const double* cdf, std::size_t n, double obs);
    /// out[i] = sum_k kernel[k] * signal[i + k], i < n_out (signal has n_out + k_len - 1 entries).
    void (*correlate)(const double* signal, std::size_t n_out, const double* kernel,
                      std::size_t k_len, double* out);
};

bool avx2_available();
Backend active_backend();
/// Overrides the dispatch decision (tests, benchmarks). Throws if the backend is unavailable.
void set_backend(Backend b);
std::string_view backend_name(Backend b);

const KernelTable& table(Backend b);
inline const KernelTable& table() { return table(active_backend()); }

inline void normal_cdf_affine(std::span<const double> x, double scale, double shift,
                              std::span<double> out) {
    table().normal_cdf_affine(x.data(), x.size(), scale, shift, out.data());
}

inline double crps_trapezoid(std::span<const double> grid, std::span<const double> cdf,
                             double obs) {
    return table().crps_trapezoid(grid.data(), cdf.data(), grid.size(), obs);
}

inline void correlate(std::span<const double> signal, std::span<const double> kernel,
                      std::span<double> out) {
    table().correlate(signal.data(), out.size(), kernel.data(), kernel.size(), out.data());
}

namespace detail {
const KernelTable& scalar_table();
#if defined(WINDCAST_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace windcast::simd
