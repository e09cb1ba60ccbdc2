// AVX2 + FMA variants of the grid kernels. Compiled with -mavx2 -mfma and only
// reached through the dispatch table after a CPUID check.

#include "windcast/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace windcast::simd::detail {

namespace {

// exp(x) for x <= 0. Range reduction x = n ln2 + r, |r| <= ln2/2, then a
// degree-13 Taylor polynomial (truncation error below 1e-17). Inputs below
// -708 flush to zero instead of producing subnormals.
inline __m256d exp_nonpositive(__m256d x) {
    const __m256d lower = _mm256_set1_pd(-708.0);
    const __m256d underflow = _mm256_cmp_pd(x, lower, _CMP_LT_OQ);
    x = _mm256_max_pd(x, lower);

    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
    const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    static constexpr double inv_fact[] = {
        1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
        1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
        1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
        1.0,                1.0};
    __m256d p = _mm256_set1_pd(inv_fact[0]);
    for (int k = 1; k < 14; ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i bits = _mm256_cvtepi32_epi64(n32);
    bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
    bits = _mm256_slli_epi64(bits, 52);
    const __m256d scale = _mm256_castsi256_pd(bits);
    const __m256d result = _mm256_mul_pd(p, scale);
    return _mm256_andnot_pd(underflow, result);
}

// Rational minimax approximations for erf/erfc in double precision (the
// 53-bit tables used by Boost.Math). Four erfc ranges on z >= 0.5 are selected
// per lane with a gather; coefficients are padded with zeros to seven terms.
constexpr double kErfY = 1.044948577880859375;
constexpr double kErfP[] = {0.0834305892146531832907, -0.338165134459360935041,
                            -0.0509990735146777432841, -0.00772758345802133288487,
                            -0.000322780120964605683831};
constexpr double kErfQ[] = {1.0, 0.455004033050794024546, 0.0875222600142252549554,
                            0.00858571925074406212772, 0.000370900071787748000569};

alignas(32) constexpr double kErfcY[4] = {0.405935764312744140625, 0.50672817230224609375,
                                          0.5405750274658203125, 0.5579090118408203125};
alignas(32) constexpr double kErfcOffset[4] = {0.5, 1.5, 3.5, 0.0};

// [coefficient][range]
alignas(32) constexpr double kErfcP[7][4] = {
    {-0.098090592216281240205, -0.0243500476207698441272, 0.00295276716530971662634,
     0.00628057170626964891937},
    {0.178114665841120341155, 0.0386540375035707201728, 0.0137384425896355332126,
     0.0175389834052493308818},
    {0.191003695796775433986, 0.04394818964209516296, 0.00840807615555585383007,
     -0.212652252872804219852},
    {0.0888900368967884466578, 0.0175679436311802092299, 0.00212825620914618649141,
     -0.687717681153649930619},
    {0.0195049001251218801359, 0.00323962406290842133584, 0.000250269961544794627958,
     -2.5518551727311523996},
    {0.00180424538297014223957, 0.000235839115596880717416, 0.113212406648847561139e-4,
     -3.22729451764143718517},
    {0.0, 0.0, 0.0, -2.8175401114513378771},
};
alignas(32) constexpr double kErfcQ[7][4] = {
    {1.0, 1.0, 1.0, 1.0},
    {1.84759070983002217845, 1.53991494948552447182, 1.04217814166938418171,
     2.79257750980575282228},
    {1.42628004845511324508, 0.982403709157920235114, 0.442597659481563127003,
     11.0567237927800161565},
    {0.578052804889902404909, 0.325732924782444448493, 0.0958492726301061423444,
     15.930646027911794143},
    {0.12385097467900864233, 0.0563921837420478160373, 0.0105982906484876531489,
     22.9367376522880577224},
    {0.0113385233577001411017, 0.00410369723978904575884, 0.000479411269521714493907,
     13.5064170191802889145},
    {0.337511472483094676155e-5, 0.0, 0.0, 5.48409182238641741584},
};

inline __m256d horner(const double* coef, int n, __m256d x) {
    __m256d p = _mm256_set1_pd(coef[n - 1]);
    for (int k = n - 2; k >= 0; --k) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(coef[k]));
    return p;
}

inline __m256d horner_gather(const double (*coef)[4], int n, __m256i idx, __m256d x) {
    __m256d p = _mm256_i64gather_pd(coef[n - 1], idx, 8);
    for (int k = n - 2; k >= 0; --k) {
        p = _mm256_fmadd_pd(p, x, _mm256_i64gather_pd(coef[k], idx, 8));
    }
    return p;
}

// erfc(u) for a vector of arguments.
inline __m256d erfc_pd(__m256d u) {
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d z = _mm256_andnot_pd(sign_mask, u);
    const __m256d negative = _mm256_cmp_pd(u, _mm256_setzero_pd(), _CMP_LT_OQ);

    // |u| < 0.5: erfc = 1 -/+ erf(|u|)
    const __m256d zz = _mm256_mul_pd(z, z);
    const __m256d erf_ratio =
        _mm256_div_pd(horner(kErfP, 5, zz), horner(kErfQ, 5, zz));
    const __m256d erf_small = _mm256_mul_pd(z, _mm256_add_pd(_mm256_set1_pd(kErfY), erf_ratio));
    const __m256d small = _mm256_blendv_pd(_mm256_sub_pd(one, erf_small),
                                           _mm256_add_pd(one, erf_small), negative);

    // |u| >= 0.5: erfc(z) = exp(-z^2) / z * (Y + P/Q)
    const __m256d ge15 = _mm256_cmp_pd(z, _mm256_set1_pd(1.5), _CMP_GE_OQ);
    const __m256d ge25 = _mm256_cmp_pd(z, _mm256_set1_pd(2.5), _CMP_GE_OQ);
    const __m256d ge45 = _mm256_cmp_pd(z, _mm256_set1_pd(4.5), _CMP_GE_OQ);
    __m256i idx = _mm256_setzero_si256();
    idx = _mm256_sub_epi64(idx, _mm256_castpd_si256(ge15));
    idx = _mm256_sub_epi64(idx, _mm256_castpd_si256(ge25));
    idx = _mm256_sub_epi64(idx, _mm256_castpd_si256(ge45));

    const __m256d offset = _mm256_i64gather_pd(kErfcOffset, idx, 8);
    const __m256d arg = _mm256_blendv_pd(_mm256_sub_pd(z, offset), _mm256_div_pd(one, z), ge45);
    const __m256d ratio =
        _mm256_div_pd(horner_gather(kErfcP, 7, idx, arg), horner_gather(kErfcQ, 7, idx, arg));
    const __m256d y = _mm256_add_pd(_mm256_i64gather_pd(kErfcY, idx, 8), ratio);

    // exp(-z^2) with the rounding error of z^2 folded back in to first order.
    const __m256d sq = _mm256_mul_pd(z, z);
    const __m256d sq_err = _mm256_fmsub_pd(z, z, sq);
    const __m256d gauss =
        _mm256_mul_pd(exp_nonpositive(_mm256_sub_pd(_mm256_setzero_pd(), sq)),
                      _mm256_sub_pd(one, sq_err));
    __m256d tail = _mm256_div_pd(_mm256_mul_pd(y, gauss), z);
    const __m256d beyond = _mm256_cmp_pd(z, _mm256_set1_pd(28.0), _CMP_GE_OQ);
    tail = _mm256_andnot_pd(beyond, tail);
    const __m256d large = _mm256_blendv_pd(tail, _mm256_sub_pd(two, tail), negative);

    const __m256d is_small = _mm256_cmp_pd(z, _mm256_set1_pd(0.5), _CMP_LT_OQ);
    return _mm256_blendv_pd(large, small, is_small);
}

void normal_cdf_affine(const double* x, std::size_t n, double scale, double shift, double* out) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vh = _mm256_set1_pd(shift);
    const __m256d neg_inv_sqrt2 = _mm256_set1_pd(-0.70710678118654752440);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d lim = _mm256_set1_pd(40.0);
    const __m256d neg_lim = _mm256_set1_pd(-40.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), vh);
        t = _mm256_min_pd(_mm256_max_pd(t, neg_lim), lim);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(half, erfc_pd(_mm256_mul_pd(t, neg_inv_sqrt2))));
    }
    if (i < n) {
        alignas(32) double buf[4] = {0.0, 0.0, 0.0, 0.0};
        alignas(32) double res[4];
        for (std::size_t j = i; j < n; ++j) buf[j - i] = x[j];
        __m256d t = _mm256_fmadd_pd(vs, _mm256_load_pd(buf), vh);
        t = _mm256_min_pd(_mm256_max_pd(t, neg_lim), lim);
        _mm256_store_pd(res, _mm256_mul_pd(half, erfc_pd(_mm256_mul_pd(t, neg_inv_sqrt2))));
        for (std::size_t j = i; j < n; ++j) out[j] = res[j - i];
    }
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Sum over cells [i, i+1], i in [begin, end), of 0.5 (f(F_i)^2 + f(F_{i+1})^2) dx_i
// where f is identity (complement = false) or 1 - F (complement = true).
template <bool complement>
double trapezoid_sq(const double* grid, const double* cdf, std::size_t begin, std::size_t end) {
    const __m256d one = _mm256_set1_pd(1.0);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = begin;
    for (; i + 4 <= end; i += 4) {
        __m256d a = _mm256_loadu_pd(cdf + i);
        __m256d b = _mm256_loadu_pd(cdf + i + 1);
        if constexpr (complement) {
            a = _mm256_sub_pd(one, a);
            b = _mm256_sub_pd(one, b);
        }
        const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(grid + i + 1), _mm256_loadu_pd(grid + i));
        const __m256d sq = _mm256_fmadd_pd(a, a, _mm256_mul_pd(b, b));
        acc = _mm256_fmadd_pd(sq, dx, acc);
    }
    double s = 0.5 * hsum(acc);
    for (; i < end; ++i) {
        double a = cdf[i];
        double b = cdf[i + 1];
        if constexpr (complement) {
            a = 1.0 - a;
            b = 1.0 - b;
        }
        s += 0.5 * (a * a + b * b) * (grid[i + 1] - grid[i]);
    }
    return s;
}

double crps_trapezoid(const double* grid, const double* cdf, std::size_t n, double obs) {
    if (n < 2) return 0.0;
    obs = std::clamp(obs, grid[0], grid[n - 1]);
    std::size_t k = static_cast<std::size_t>(std::upper_bound(grid, grid + n, obs) - grid);
    k = k == 0 ? 0 : k - 1;
    if (k >= n - 1) k = n - 2;

    const double left = trapezoid_sq<false>(grid, cdf, 0, k);
    const double right = trapezoid_sq<true>(grid, cdf, k + 1, n - 1);
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
    std::size_t i = 0;
    for (; i + 8 <= n_out; i += 8) {
        __m256d acc0 = _mm256_setzero_pd();
        __m256d acc1 = _mm256_setzero_pd();
        for (std::size_t k = 0; k < k_len; ++k) {
            const __m256d w = _mm256_broadcast_sd(kernel + k);
            acc0 = _mm256_fmadd_pd(w, _mm256_loadu_pd(signal + i + k), acc0);
            acc1 = _mm256_fmadd_pd(w, _mm256_loadu_pd(signal + i + k + 4), acc1);
        }
        _mm256_storeu_pd(out + i, acc0);
        _mm256_storeu_pd(out + i + 4, acc1);
    }
    for (; i < n_out; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < k_len; ++k) s += kernel[k] * signal[i + k];
        out[i] = s;
    }
}

}  // namespace

const KernelTable& avx2_table() {
    static const KernelTable t{&normal_cdf_affine, &crps_trapezoid, &correlate};
    return t;
}

}  // namespace windcast::simd::detail
