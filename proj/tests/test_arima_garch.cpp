#include "doctest.h"
#include "oracles.hpp"

#include "windcast/arima_garch.hpp"
#include "windcast/ets.hpp"
#include "windcast/stats.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace windcast;

namespace {

struct Path {
    std::vector<double> w;
    std::vector<double> var;
};

// ARMA(1,1) increments with GARCH(1,1) or constant innovation variance.
Path arma_garch_path(std::size_t n, double phi, double theta, double sigma2, double omega,
                     double alpha, double beta, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    const bool garch = alpha > 0.0 || beta > 0.0;
    double var = garch ? omega / (1.0 - alpha - beta) : sigma2;
    double w_prev = 0.0;
    double eps_prev = 0.0;
    Path p;
    for (std::size_t t = 0; t < n + 500; ++t) {
        if (garch && t > 0) var = omega + alpha * eps_prev * eps_prev + beta * var;
        const double eps = std::sqrt(var) * z(rng);
        const double w = phi * w_prev + eps + theta * eps_prev;
        if (t >= 500) {
            p.w.push_back(w);
            p.var.push_back(var);
        }
        w_prev = w;
        eps_prev = eps;
    }
    return p;
}

ArimaGarchSpec arima(int p, int q) { return {p, q, 0, 0, true, 1}; }
ArimaGarchSpec garch(int p, int q) { return {p, q, 1, 1, false, 1}; }

}  // namespace

TEST_CASE("spec validation and labels") {
    CHECK_NOTHROW(garch(4, 3).validate());
    CHECK_THROWS((ArimaGarchSpec{7, 0, 0, 0, true, 1}.validate()));
    CHECK_THROWS((ArimaGarchSpec{1, 1, 1, 1, true, 1}.validate()));
    CHECK_THROWS((ArimaGarchSpec{1, 1, 3, 1, false, 1}.validate()));
    CHECK(arima(2, 3).n_params() == 7);
    CHECK(garch(4, 3).n_params() == 11);
    CHECK(arima(2, 3).label() == "ARIMA(2,1,3)");
    CHECK(garch(4, 3).label() == "ARIMA(4,1,3)-GARCH(1,1)");
}

TEST_CASE("pacf reparameterization") {
    const std::vector<double> pacf{0.6, -0.3, 0.2};
    const auto c = pacf_to_coefficients(pacf);
    CHECK(is_stationary(c));
    const auto back = coefficients_to_pacf(c);
    for (std::size_t i = 0; i < pacf.size(); ++i) CHECK(back[i] == doctest::Approx(pacf[i]).epsilon(1e-12));
    CHECK_FALSE(is_stationary(std::vector{1.1}));
    CHECK(is_stationary(std::vector{0.5, 0.3}));
    CHECK_FALSE(is_stationary(std::vector{0.5, 0.6}));
}

TEST_CASE("parameter checks") {
    ArimaGarchParams p;
    p.phi = {1.2};
    CHECK_THROWS_AS(check_params(arima(1, 0), p), std::invalid_argument);
    p.phi = {0.5};
    p.theta = {-1.5};
    CHECK_THROWS_AS(check_params(arima(1, 1), p), std::invalid_argument);
    ArimaGarchParams g;
    g.omega = 0.1;
    g.alpha_g = {0.5};
    g.beta_g = {0.6};
    CHECK_THROWS_AS(check_params(garch(0, 0), g), std::invalid_argument);
}

TEST_CASE("loglik of standard normal noise") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> w(10000);
    for (auto& v : w) v = z(rng);
    ArimaGarchParams p;
    p.sigma2_const = 1.0;
    const double ll = loglik(arima(0, 0), p, w);
    const double expect = -0.5 * std::log(2.0 * std::numbers::pi) - 0.5;
    CHECK(std::abs(ll / static_cast<double>(w.size()) - expect) < 0.02);

    // Direct sum with the same pre-sample conventions.
    double direct = 0.0;
    for (double v : w) direct += std::log(oracle::phi(v));
    CHECK(ll == doctest::Approx(direct).epsilon(1e-12));

    std::vector<double> doubled(w);
    for (auto& v : doubled) v *= 2.0;
    CHECK(loglik(arima(0, 0), p, doubled) < ll);
}

TEST_CASE("constant-variance ARMA likelihood matches a hand recursion") {
    const auto path = arma_garch_path(3000, 0.4, -0.3, 0.5, 0, 0, 0, 32);
    ArimaGarchParams p;
    p.mu = 0.01;
    p.phi = {0.4};
    p.theta = {-0.3};
    p.sigma2_const = 0.5;
    const auto spec = arima(1, 1);
    double w_prev = 0.0;
    double e_prev = 0.0;
    double ll = 0.0;
    for (std::size_t t = 0; t < path.w.size(); ++t) {
        const double e = path.w[t] - p.mu - 0.4 * w_prev + 0.3 * e_prev;
        if (static_cast<int>(t) >= spec.burn_in()) ll += std::log(oracle::phi(e / std::sqrt(0.5)) / std::sqrt(0.5));
        w_prev = path.w[t];
        e_prev = e;
    }
    CHECK(loglik(spec, p, path.w) == doctest::Approx(ll).epsilon(1e-12));

    // GARCH recursion with alpha = beta = 0 and omega = sigma^2 is the same likelihood.
    ArimaGarchParams g = p;
    g.omega = 0.5;
    g.alpha_g = {0.0};
    g.beta_g = {0.0};
    CHECK(loglik(garch(1, 1), g, path.w) == doctest::Approx(ll).epsilon(1e-12));
}

TEST_CASE("true parameters beat a shifted AR coefficient") {
    int wins = 0;
    const int trials = 20;
    for (int seed = 0; seed < trials; ++seed) {
        const auto path = arma_garch_path(20000, 0.5, -0.3, 0, 0.05, 0.1, 0.85, 100 + seed);
        ArimaGarchParams p;
        p.phi = {0.5};
        p.theta = {-0.3};
        p.omega = 0.05;
        p.alpha_g = {0.1};
        p.beta_g = {0.85};
        ArimaGarchParams shifted = p;
        shifted.phi = {0.7};
        wins += loglik(garch(1, 1), p, path.w) >= loglik(garch(1, 1), shifted, path.w);
    }
    CHECK(wins == trials);
}

TEST_CASE("ARIMA(1,1,1) parameter recovery and scale consistency") {
    const auto path = arma_garch_path(10000, 0.5, -0.7, 0.01, 0, 0, 0, 41);
    const auto m = fit(arima(1, 1), path.w);
    CHECK(m.report.converged);
    CHECK(std::abs(m.params.phi[0] - 0.5) < 0.05);
    CHECK(std::abs(m.params.theta[0] + 0.7) < 0.05);
    CHECK(m.params.sigma2_const == doctest::Approx(0.01).epsilon(0.05));
    CHECK(m.report.bic == doctest::Approx(m.report.n_params * std::log(m.report.n_obs) - 2.0 * m.report.loglik));

    std::vector<double> scaled(path.w);
    for (auto& v : scaled) v *= 3.0;
    const auto ms = fit(arima(1, 1), scaled);
    CHECK(std::abs(ms.params.phi[0] - m.params.phi[0]) < 1e-3);
    CHECK(std::abs(ms.params.theta[0] - m.params.theta[0]) < 1e-3);
    CHECK(ms.params.sigma2_const / m.params.sigma2_const == doctest::Approx(9.0).epsilon(1e-3));
}

TEST_CASE("GARCH(1,1) persistence recovery") {
    const auto path = arma_garch_path(20000, 0, 0, 0, 0.05, 0.1, 0.85, 42);
    const auto m = fit(garch(0, 0), path.w);
    CHECK(std::abs(m.params.alpha_g[0] + m.params.beta_g[0] - 0.95) < 0.05);
    CHECK(std::abs(m.params.alpha_g[0] - 0.1) < 0.05);
}

TEST_CASE("degenerate input is rejected") {
    const std::vector<double> zeros(500, 0.0);
    CHECK_THROWS(fit(arima(0, 0), zeros));
}

TEST_CASE("BIC selection") {
    const std::vector<ArimaGarchSpec> grid{arima(0, 0), arima(1, 0), arima(0, 1)};
    int picked_white = 0;
    const int seeds = 10;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto path = arma_garch_path(10000, 0, 0, 1.0, 0, 0, 0, 200 + seed);
        const auto sel = select_bic(grid, path.w);
        picked_white += sel.best.spec == arima(0, 0);
        CHECK(sel.candidates.size() == 3);
    }
    CHECK(picked_white >= 9);

    const auto path = arma_garch_path(2000, 0.3, 0, 1.0, 0, 0, 0, 7);
    const std::vector<ArimaGarchSpec> one{arima(2, 1)};
    CHECK(select_bic(one, path.w).best.spec == arima(2, 1));
}

TEST_CASE("true spec usually wins BIC against an over-parameterized spec") {
    const std::vector<ArimaGarchSpec> grid{arima(1, 1), arima(2, 2)};
    int wins = 0;
    const int trials = 10;
    for (int seed = 0; seed < trials; ++seed) {
        const auto path = arma_garch_path(10000, 0.5, -0.3, 1.0, 0, 0, 0, 300 + seed);
        wins += select_bic(grid, path.w).best.spec == arima(1, 1);
    }
    CHECK(wins >= 8);
}

TEST_CASE("mean forecasts") {
    const std::vector<double> z{0.1, -0.3, 0.2, 0.5};
    ArimaGarchParams rw;
    for (double f : forecast_mean(arima(0, 0), rw, z, 10)) CHECK(f == 0.5);

    ArimaGarchParams drift;
    drift.mu = 0.02;
    const auto d = forecast_mean(arima(0, 0), drift, z, 5);
    for (int h = 1; h <= 5; ++h) CHECK(d[h - 1] == doctest::Approx(0.5 + 0.02 * h).epsilon(1e-14));

    ArimaGarchParams ar;
    ar.phi = {0.5};
    CHECK(forecast_mean(arima(1, 0), ar, z, 1)[0] == doctest::Approx(0.5 + 0.5 * 0.3).epsilon(1e-14));

    std::vector<double> levels{0.0};
    std::mt19937_64 rng(51);
    std::normal_distribution<double> n(0.0, 0.3);
    for (int t = 0; t < 200; ++t) levels.push_back(levels.back() + n(rng));
    const auto f = forecast_mean(arima(1, 1), ArimaGarchParams{0.0, {0.6}, {-0.4}}, levels, 12);
    const auto expect = oracle::arima111_forecast(0.6, -0.4, levels, 12);
    for (int h = 0; h < 12; ++h) CHECK(f[h] == doctest::Approx(expect[h]).epsilon(1e-12));
}

TEST_CASE("AR(1) increment forecast agrees with Monte Carlo") {
    const std::vector<double> z{0.0, 0.4, 1.0};
    ArimaGarchParams p;
    p.phi = {0.5};
    p.sigma2_const = 1.0;
    const int h = 5;
    const auto f = forecast_mean(arima(1, 0), p, z, h);
    const auto v = forecast_variance(arima(1, 0), p, z, h);

    std::mt19937_64 rng(52);
    std::normal_distribution<double> n(0.0, 1.0);
    const int paths = 100000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < paths; ++i) {
        double level = 1.0;
        double w = 0.6;
        for (int j = 0; j < h; ++j) {
            w = 0.5 * w + n(rng);
            level += w;
        }
        sum += level;
        sum2 += level * level;
    }
    const double mc = sum / paths;
    const double mc_var = sum2 / paths - mc * mc;
    CHECK(std::abs(f[h - 1] - mc) < 3.0 * std::sqrt(mc_var / paths));
    CHECK(v[h - 1] == doctest::Approx(mc_var).epsilon(0.02));
}

TEST_CASE("variance forecasts") {
    const std::vector<double> z{0.0, 0.1, 0.05, 0.2};
    ArimaGarchParams rw;
    rw.sigma2_const = 0.3;
    const auto v = forecast_variance(arima(0, 0), rw, z, 8);
    for (int h = 1; h <= 8; ++h) CHECK(v[h - 1] == doctest::Approx(0.3 * h).epsilon(1e-14));

    for (double phi : {-0.8, -0.2, 0.0, 0.4, 0.9}) {
        for (double theta : {-0.9, -0.5, 0.0, 0.3, 0.8}) {
            ArimaGarchParams p{0.0, {phi}, {theta}};
            p.sigma2_const = 0.01;
            const auto fv = forecast_variance(arima(1, 1), p, z, 96);
            for (int h = 1; h <= 96; ++h) {
                CHECK(fv[h - 1] == doctest::Approx(ets_variance_h(1.0 + theta, phi, 0.01, h)).epsilon(1e-12));
                if (h > 1) CHECK(fv[h - 1] >= fv[h - 2]);
            }

            ArimaGarchFilter filter(arima(1, 1), p, 1.0);
            const auto psi = filter.psi_weights(30);
            for (int j = 0; j < 30; ++j) {
                const double pj = std::pow(phi, j);
                const double expect = phi == 0.0 && j == 0
                                          ? 1.0
                                          : pj + (1.0 + theta) * (1.0 - pj) / (1.0 - phi);
                CHECK(psi[j] == doctest::Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("GARCH innovation variance converges to its unconditional level") {
    ArimaGarchParams p;
    p.omega = 0.05;
    p.alpha_g = {0.1};
    p.beta_g = {0.85};
    ArimaGarchFilter filter(garch(0, 0), p, 5.0);
    for (double z : {0.0, 2.0, -1.0, 3.5}) filter.update(z);
    const auto iv = filter.innovation_variance(500);
    CHECK(std::abs(iv.back() - 0.05 / (1.0 - 0.1 - 0.85)) < 0.01);
    const auto f = filter.forecast(500);
    for (std::size_t j = 1; j < f.variance.size(); ++j) CHECK(f.variance[j] >= f.variance[j - 1]);
}

TEST_CASE("one-step densities of the true model") {
    const auto path = arma_garch_path(5000, 0.5, -0.3, 0, 0.05, 0.1, 0.85, 61);
    ArimaGarchParams p;
    p.phi = {0.5};
    p.theta = {-0.3};
    p.omega = 0.05;
    p.alpha_g = {0.1};
    p.beta_g = {0.85};
    std::vector<double> z{0.0};
    for (double w : path.w) z.push_back(z.back() + 0.05 * w);
    // Rescale so the levels stay in a moderate logit range.
    p.omega *= 0.0025;

    const auto rw = forecast_density(arima(0, 0), ArimaGarchParams{}, std::vector{0.0, 0.7}, 1);
    CHECK(rw[0].z_mean == 0.7);
    const double total = oracle::integrate(
        [&](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : pushforward_pdf(rw[0], y); },
        oracle::logit_breaks(rw[0].z_mean, std::sqrt(rw[0].z_var)));
    CHECK(std::abs(total - 1.0) < 1e-6);

    ArimaGarchFilter filter(garch(1, 1), p, 0.0025);
    std::vector<double> pits;
    for (std::size_t t = 0; t + 1 < z.size(); ++t) {
        filter.update(z[t]);
        if (t < 100) continue;
        const auto f = filter.forecast(1);
        pits.push_back(oracle::Phi((z[t + 1] - f.mean[0]) / std::sqrt(f.variance[0])));
    }
    const double d = ks_statistic_uniform(pits);
    CHECK(ks_pvalue(d, pits.size()) > 0.01);
}
