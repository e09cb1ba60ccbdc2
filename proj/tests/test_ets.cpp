#include "doctest.h"
#include "oracles.hpp"

#include "windcast/arima_garch.hpp"
#include "windcast/ets.hpp"
#include "windcast/simulate.hpp"
#include "windcast/stats.hpp"
#include "windcast/truncnorm.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace windcast;

namespace {

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

double quad_mean(double loc, double s) {
    return oracle::integrate(
        [&](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : y * oracle::truncnorm_pdf(loc, s, y); },
        oracle::linear_breaks(loc, s));
}

}  // namespace

TEST_CASE("truncated normal density") {
    const TruncNorm wide(0.5, 1e6);
    for (double y = 0.01; y < 1.0; y += 0.07) CHECK(std::abs(truncnorm_pdf(wide, y) - 1.0) < 1e-3);

    const TruncNorm narrow(0.5, 0.01);
    CHECK(truncnorm_pdf(narrow, 0.5) == doctest::Approx(3.98942).epsilon(1e-5));
    CHECK(narrow.normalizer() == doctest::Approx(1.0).epsilon(1e-6));

    for (double loc : {-0.5, 0.1, 0.5, 1.3}) {
        for (double s : {0.05, 0.3, 2.0}) {
            const TruncNorm d(loc, s * s);
            for (double y : {0.02, 0.4, 0.93}) {
                CHECK(truncnorm_pdf(d, y) == doctest::Approx(oracle::truncnorm_pdf(loc, s, y)).epsilon(1e-10));
                CHECK(truncnorm_log_pdf(d, y) == doctest::Approx(std::log(truncnorm_pdf(d, y))).epsilon(1e-12));
            }
            if (oracle::mass(-loc / s, (1 - loc) / s) < 1e-200) continue;
            const double total = oracle::integrate(
                [&](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : truncnorm_pdf(d, y); },
                oracle::linear_breaks(loc, s));
            CHECK(std::abs(total - 1.0) < 1e-8);
        }
    }

    CHECK_THROWS_AS(TruncNorm(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(TruncNorm(60.0, 1e-4).normalizer(), std::domain_error);
}

TEST_CASE("truncated normal cdf and quantile") {
    const TruncNorm d(0.3, 0.04);
    for (double y : {0.1, 0.5, 0.9}) {
        CHECK(std::abs(truncnorm_quantile(d, truncnorm_cdf(d, y)) - y) < 1e-9);
    }
    CHECK(truncnorm_cdf(d, 0.0) == 0.0);
    CHECK(truncnorm_cdf(d, 1.0) == 1.0);
    const double direct = (oracle::Phi((0.6 - 0.3) / 0.2) - oracle::Phi(-0.3 / 0.2)) /
                          (oracle::Phi(0.7 / 0.2) - oracle::Phi(-0.3 / 0.2));
    CHECK(truncnorm_cdf(d, 0.6) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("truncated normal mean") {
    for (double s : {0.01, 0.2, 1.0, 50.0}) CHECK(truncnorm_mean(TruncNorm(0.5, s * s)) == doctest::Approx(0.5).epsilon(1e-14));

    const double expect = (oracle::phi(0.0) - oracle::phi(1.0)) / (oracle::Phi(1.0) - oracle::Phi(0.0));
    CHECK(truncnorm_mean(TruncNorm(0.0, 1.0)) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(expect == doctest::Approx(0.4599).epsilon(1e-4));

    const double high = truncnorm_mean(TruncNorm(2.0, 0.25));
    CHECK(high < 1.0);
    CHECK(high > truncnorm_mean(TruncNorm(0.5, 0.25)));

    for (double loc : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
        for (double s : {0.1, 0.3, 1.0, 3.0}) {
            CHECK(std::abs(truncnorm_mean(TruncNorm(loc, s * s)) - quad_mean(loc, s)) < 1e-8);
        }
    }
}

TEST_CASE("level smoother") {
    auto st = ets_init_level(1.0, 0.3, 0.4);
    for (double y : {0.1, 0.7, 0.2}) {
        st = ets_update_level(st, y);
        CHECK(st.S == y);
    }

    EtsLevelState half{0.5, 0.0, 0.2, 0.1, 0.2};
    CHECK(ets_update_level(half, 0.4).S == doctest::Approx(0.3).epsilon(1e-15));

    auto c = ets_init_level(0.3, 0.0, 0.9);
    double gap = std::abs(c.S - 0.4);
    for (int t = 0; t < 20; ++t) {
        c = ets_update_level(c, 0.4);
        const double next = std::abs(c.S - 0.4);
        CHECK(next == doctest::Approx(0.7 * gap).epsilon(1e-12));
        gap = next;
    }
}

TEST_CASE("level forecasts") {
    EtsLevelState plain{0.4, 0.0, 0.35, 0.3, 0.5};
    for (double f : ets_forecast_level(plain, 10)) CHECK(f == 0.35);

    EtsLevelState flat{0.4, 0.7, 0.35, 0.3, 0.3};
    for (double f : ets_forecast_level(flat, 10)) CHECK(f == doctest::Approx(0.35).epsilon(1e-15));

    EtsLevelState st{0.4, 0.6, 0.35, 0.3, 0.5};
    CHECK(ets_forecast_level(st, 1)[0] == doctest::Approx(0.35 + 0.6 * 0.2).epsilon(1e-15));
    CHECK(ets_one_step(st) == ets_forecast_level(st, 1)[0]);
}

TEST_CASE("level forecasts equal ARIMA(1,1,1) forecasts") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    std::vector<double> y(300);
    for (auto& v : y) v = u(rng);
    for (double alpha = 0.05; alpha < 1.0; alpha += 0.15) {
        for (double phi = -0.85; phi < 0.9; phi += 0.25) {
            auto st = ets_init_level(alpha, phi, y[0]);
            for (std::size_t t = 1; t < y.size(); ++t) st = ets_update_level(st, y[t]);
            const auto ets = ets_forecast_level(st, 96);

            // The ARIMA recursion with zero pre-sample shocks reproduces S_1 = y_1.
            ArimaGarchParams p{0.0, {phi}, {alpha - 1.0}};
            const auto arima = forecast_mean({1, 1, 0, 0, true, 1}, p, y, 96);
            const auto oracle = oracle::arima111_forecast(phi, alpha - 1.0, y, 96);
            for (int h = 0; h < 96; ++h) {
                CHECK(std::abs(ets[h] - arima[h]) < 1e-12);
                CHECK(std::abs(ets[h] - oracle[h]) < 1e-12);
            }
        }
    }
}

TEST_CASE("forecast variance") {
    CHECK(ets_variance_h(0.3, 0.5, 0.02, 1) == 0.02);
    for (int h = 1; h <= 20; ++h) CHECK(ets_variance_h(1.0, 0.0, 0.02, h) == doctest::Approx(0.02 * h).epsilon(1e-14));

    for (double alpha : {0.1, 0.6, 1.0}) {
        for (double phi : {-0.7, 0.0, 0.5}) {
            double omega = 1.0;
            CHECK(ets_omega(alpha, phi, 0) == 1.0);
            for (int h = 1; h < 40; ++h) {
                omega += std::pow(phi, h - 1) * (phi + alpha - 1.0);
                CHECK(std::abs(ets_omega(alpha, phi, h) - omega) < 1e-14);
            }
        }
    }

    // Monte Carlo of the ARIMA(1,1,1) level ten steps ahead.
    const double alpha = 0.3;
    const double phi = 0.5;
    const double theta = alpha - 1.0;
    std::mt19937_64 rng(72);
    std::normal_distribution<double> n(0.0, 1.0);
    const int paths = 1000000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < paths; ++i) {
        double level = 0.0;
        double w = 0.0;
        double e = 0.0;
        for (int j = 0; j < 10; ++j) {
            const double e_new = n(rng);
            w = phi * w + e_new + theta * e;
            e = e_new;
            level += w;
        }
        sum += level;
        sum2 += level * level;
    }
    const double var = sum2 / paths - (sum / paths) * (sum / paths);
    CHECK(ets_variance_h(alpha, phi, 1.0, 10) == doctest::Approx(var).epsilon(0.01));
}

TEST_CASE("variance smoother") {
    CHECK(std::abs(g_func(kSqrt2OverPi, 3.0)) < 1e-15);
    CHECK(g_func(1.3, 0.7) == g_func(-1.3, 0.7));
    CHECK(g_func(0.0, 2.0) == doctest::Approx(-2.0 * kSqrt2OverPi).epsilon(1e-15));

    auto st = ets_init_var(1.0, 0.0, 1.5);
    for (double e : {0.3, -2.0, 1.1}) {
        st = ets_update_var(st, e);
        CHECK(ets_var_one_step_log(st) == doctest::Approx(g_func(e, 1.5)).epsilon(1e-14));
    }

    auto fixed = ets_init_var(0.2, 0.3, 2.0, 1.0);
    for (int t = 0; t < 400; ++t) fixed = ets_update_var(fixed, kSqrt2OverPi);
    CHECK(std::abs(fixed.logV) < 1e-12);
}

TEST_CASE("smoother recursion equals the EGARCH(2,1) form") {
    std::mt19937_64 rng(73);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int draw = 0; draw < 50; ++draw) {
        const double gamma = 0.01 + 0.98 * u(rng);
        const double phi_v = -0.9 + 1.8 * u(rng);
        const double theta_v = 0.1 + 3.0 * u(rng);
        auto st = ets_init_var(gamma, phi_v, theta_v);
        double g_prev = g_func(0.0, theta_v);
        double log_s2 = ets_var_one_step_log(st);
        for (int t = 0; t < 200; ++t) {
            const double e = n(rng);
            st = ets_update_var(st, e);
            const double g = g_func(e, theta_v);
            const double egarch = (1.0 - gamma) * log_s2 + (gamma + phi_v) * g - phi_v * g_prev;
            log_s2 = ets_var_one_step_log(st);
            // The initial state is not itself an output of the recursion.
            if (t > 0) CHECK(std::abs(log_s2 - egarch) < 1e-12);
            g_prev = g;
        }
    }
}

TEST_CASE("multi-step EGARCH variance") {
    EtsLevelState level{0.4, 0.3, 0.5, 0.5, 0.5};
    auto v = ets_init_var(0.15, 0.2, 1.2);
    for (double e : {1.5, -0.2, 2.4, 0.9}) v = ets_update_var(v, e);

    const auto f = egarch_forecast_var(level, v, 200);
    CHECK(f.innovation_var[0] == doctest::Approx(std::exp(ets_var_one_step_log(v))).epsilon(1e-14));
    CHECK_FALSE(f.clamped);
    for (std::size_t j = 3; j < 200; ++j) {
        const double a = std::log(f.innovation_var[j]);
        const double b = std::log(f.innovation_var[j - 1]);
        CHECK(a == doctest::Approx(0.85 * b).epsilon(1e-9));
    }
    std::vector<double> s2(f.innovation_var.begin(), f.innovation_var.end());
    const auto combined = ets_combine_variance(0.4, 0.3, s2);
    for (std::size_t h = 0; h < combined.size(); ++h) CHECK(combined[h] == doctest::Approx(f.location_var[h]).epsilon(1e-13));

    // gamma = 1, phi_v = 0 and a vanishing theta give a flat unit innovation variance.
    auto flat = ets_init_var(1.0 - 1e-12, 0.0, 1e-12);
    flat = ets_update_var(flat, 2.0);
    const auto fl = egarch_forecast_var(level, flat, 30);
    for (int h = 1; h <= 30; ++h) {
        CHECK(fl.location_var[h - 1] == doctest::Approx(ets_variance_h(0.4, 0.3, 1.0, h)).epsilon(1e-9));
    }
}

TEST_CASE("density forecasts") {
    EtsParams p;
    p.alpha = 0.4;
    p.phi_s = 0.3;
    p.s2_eps = 0.004;
    EtsLevelState level{0.4, 0.3, 0.45, 0.4, 0.5};
    const auto d = forecast_density_ets(p, level, EtsVarState{}, 5);
    CHECK(d[0].loc == ets_one_step(level));
    CHECK(d[0].scale2 == 0.004);
    for (int h = 1; h <= 5; ++h) CHECK(d[h - 1].scale2 == doctest::Approx(ets_variance_h(0.4, 0.3, 0.004, h)));
    const double total = oracle::integrate(
        [&](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : truncnorm_pdf(d[4], y); },
        oracle::linear_breaks(d[4].loc, d[4].scale()));
    CHECK(std::abs(total - 1.0) < 1e-8);
}

namespace {

Simulation bounded_path(std::size_t n, std::uint64_t seed, bool egarch) {
    SimSpec s;
    s.model = egarch ? SimModel::arima111_egarch21 : SimModel::arima111;
    s.space = SimSpace::bounded;
    s.n = n;
    s.seed = seed;
    s.start = 0.5;
    s.phi = 0.4;
    s.theta = -0.7;
    s.sigma2 = 1e-4;
    s.gamma = 0.1;
    s.phi_v = 0.2;
    s.theta_v = 0.8;
    s.log_var_level = std::log(1e-4);
    return simulate_path(s);
}

}  // namespace

TEST_CASE("one-step PIT of the true model is uniform") {
    const auto sim = bounded_path(5000, 74, false);
    EtsParams p;
    p.alpha = 0.3;
    p.phi_s = 0.4;
    p.s2_eps = 1e-4;
    EtsFilter filter(p);
    std::vector<double> pits;
    const auto y = sim.series.values();
    for (std::size_t t = 0; t + 1 < y.size(); ++t) {
        filter.update(y[t]);
        if (t < 100) continue;
        pits.push_back(truncnorm_cdf(filter.forecast(1)[0], y[t + 1]));
    }
    CHECK(ks_pvalue(ks_statistic_uniform(pits), pits.size()) > 0.01);
}

TEST_CASE("fit recovers smoothing parameters and variance") {
    const auto sim = bounded_path(10000, 75, false);
    const auto m = fit_ets(sim.series.values(), false);
    CHECK(std::abs(m.params.alpha - 0.3) < 0.07);
    CHECK(std::abs(m.params.phi_s - 0.4) < 0.07);
    CHECK(m.params.s2_eps == doctest::Approx(1e-4).epsilon(0.1));
    CHECK(m.report.n_params == 3);

    CHECK_THROWS(fit_ets(std::vector(600, 0.4), false));
}

TEST_CASE("five-parameter fit is insensitive to the initial log variance") {
    const auto sim = bounded_path(10000, 76, true);
    EtsFitOptions lo;
    lo.init_log_v = -1.0;
    EtsFitOptions hi;
    hi.init_log_v = 1.0;
    const auto a = fit_ets(sim.series.values(), true, lo);
    const auto b = fit_ets(sim.series.values(), true, hi);
    CHECK(std::abs(a.params.alpha - 0.3) < 0.07);
    CHECK(std::abs(a.params.phi_s - 0.4) < 0.07);
    CHECK(std::abs(a.params.alpha - b.params.alpha) < 1e-2);
    CHECK(std::abs(a.params.phi_s - b.params.phi_s) < 1e-2);
    CHECK(std::abs(a.report.loglik - b.report.loglik) < 1e-2 * std::abs(a.report.loglik) + 1.0);
}
