// Acceptance suite: one line per criterion. With no arguments every criterion
// runs; otherwise only the listed criterion numbers.

#include "oracles.hpp"

#include "windcast/arima_garch.hpp"
#include "windcast/backtest.hpp"
#include "windcast/density.hpp"
#include "windcast/ets.hpp"
#include "windcast/parallel.hpp"
#include "windcast/report.hpp"
#include "windcast/scoring.hpp"
#include "windcast/simulate.hpp"
#include "windcast/stats.hpp"
#include "windcast/transforms.hpp"
#include "windcast/truncnorm.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <span>
#include <utility>
#include <string>
#include <vector>

using namespace windcast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 16,512 points: 11,008 training, 5,504 test.
constexpr std::size_t kSeriesLen = 16512;
constexpr std::size_t kTrainLen = 11008;
constexpr std::size_t kTestLen = 5504;

// Bounded ARIMA(1,1,1)-EGARCH(2,1) path: the data-generating process of the
// ETS(A,N,N|EC)-(A,N,N|EC) model with alpha = 1 + theta.
SimSpec egarch_spec(std::uint64_t seed) {
    SimSpec s;
    s.model = SimModel::arima111_egarch21;
    s.space = SimSpace::bounded;
    s.n = kSeriesLen;
    s.seed = seed;
    s.start = 0.4;
    s.phi = 0.4;
    s.theta = -0.6;
    s.gamma = 0.003;
    s.phi_v = 0.0;
    s.theta_v = 40.0;
    s.log_var_level = std::log(1e-4);
    return s;
}

Outcome criterion1() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    std::uniform_real_distribution<double> up(-0.9, 0.9);
    std::uniform_real_distribution<double> uy(0.05, 0.95);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double alpha = ua(rng);
        const double phi_s = up(rng);
        std::vector<double> y(200);
        for (auto& v : y) v = uy(rng);

        auto state = ets_init_level(alpha, phi_s, y[0]);
        for (std::size_t t = 1; t < y.size(); ++t) state = ets_update_level(state, y[t]);
        const auto ets = ets_forecast_level(state, 96);

        ArimaGarchSpec spec{1, 1, 0, 0, true, 1};
        ArimaGarchParams params;
        params.phi = {phi_s};
        params.theta = {alpha - 1.0};
        params.sigma2_const = 1.0;
        ArimaGarchFilter filter(spec, params, 1.0);
        for (double v : y) filter.update(v);
        const auto arima = filter.forecast(96).mean;
        const auto direct = oracle::arima111_forecast(phi_s, alpha - 1.0, y, 96);

        for (int h = 0; h < 96; ++h) {
            worst = std::max({worst, std::abs(ets[h] - arima[h]), std::abs(ets[h] - direct[h])});
        }
    }
    return {worst <= 1e-10,
            fmt("ETS vs iterated ARIMA(1,1,1) forecasts, 100 pairs x h=1..96: max |diff| = %.3g "
                "(tol 1e-10)",
                worst)};
}

Outcome criterion2() {
    const double alphas[] = {0.3, 0.7};
    const double phis[] = {-0.5, 0.0, 0.5};
    const int horizons[] = {1, 10, 96};
    constexpr int kPaths = 1000000;
    constexpr double s2 = 1.0;
    struct Cell {
        double alpha, phi;
        double var[3];
    };
    std::vector<Cell> cells;
    for (double a : alphas)
        for (double p : phis) cells.push_back({a, p, {}});

    parallel_for(cells.size(), [&](std::size_t c) {
        auto& cell = cells[c];
        std::mt19937_64 rng(2000 + c);
        std::normal_distribution<double> normal(0.0, std::sqrt(s2));
        const double theta = cell.alpha - 1.0;
        double sum[3] = {};
        double sum2[3] = {};
        for (int path = 0; path < kPaths; ++path) {
            // Origin state: last increment and shock known and equal to zero.
            double level = 0.0;
            double w = 0.0;
            double e_prev = 0.0;
            int k = 0;
            for (int j = 1; j <= 96; ++j) {
                const double e = normal(rng);
                w = cell.phi * w + e + theta * e_prev;
                e_prev = e;
                level += w;
                if (j == horizons[k]) {
                    sum[k] += level;
                    sum2[k] += level * level;
                    ++k;
                }
            }
        }
        for (int k = 0; k < 3; ++k) {
            const double m = sum[k] / kPaths;
            cell.var[k] = (sum2[k] - kPaths * m * m) / (kPaths - 1);
        }
    });

    double worst = 0.0;
    for (const auto& cell : cells) {
        for (int k = 0; k < 3; ++k) {
            const double formula = ets_variance_h(cell.alpha, cell.phi, s2, horizons[k]);
            worst = std::max(worst, std::abs(formula / cell.var[k] - 1.0));
        }
    }
    return {worst < 0.01, fmt("variance formula vs 1e6 simulated paths, 6 pairs x h={1,10,96}: "
                              "max relative error = %.4f (tol 0.01)",
                              worst)};
}

Outcome criterion3() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> ug(0.01, 0.99);
    std::uniform_real_distribution<double> up(-0.95, 0.95);
    std::uniform_real_distribution<double> ut(0.05, 3.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    int steps = 0;
    for (int draw = 0; draw < 10; ++draw) {
        const double gamma = ug(rng);
        const double phi_v = up(rng);
        const double theta_v = ut(rng);
        auto state = ets_init_var(gamma, phi_v, theta_v, normal(rng));
        state = ets_update_var(state, normal(rng));
        // EGARCH(2,1) form seeded from the smoother after two inputs.
        double log_s2 = ets_var_one_step_log(state);
        double g_prev = state.prev_g;
        for (int t = 0; t < 1000; ++t) {
            const double e = 3.0 * normal(rng);
            state = ets_update_var(state, e);
            const double g = theta_v * (std::abs(e) - std::sqrt(2.0 / M_PI));
            log_s2 = (1.0 - gamma) * log_s2 + (gamma + phi_v) * g - phi_v * g_prev;
            g_prev = g;
            const double smoother = ets_var_one_step_log(state);
            worst = std::max(worst, std::abs(smoother - log_s2) / std::max(1.0, std::abs(log_s2)));
            ++steps;
        }
    }
    return {worst <= 1e-12, fmt("smoother vs EGARCH(2,1) log-variance over %d random steps: "
                                "max |diff| = %.3g (tol 1e-12)",
                                steps, worst)};
}

Outcome criterion4() {
    double worst_ln = 0.0;
    for (double m = -3.0; m <= 3.0; m += 0.5) {
        for (double v : {0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0}) {
            const LogisticNormal d(m, v);
            const double total = oracle::integrate(
                [&](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : pushforward_pdf(d, y); },
                oracle::logit_breaks(m, std::sqrt(v)));
            worst_ln = std::max(worst_ln, std::abs(total - 1.0));
        }
    }
    double worst_tn = 0.0;
    for (double loc : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        for (double s : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
            const TruncNorm d(loc, s * s);
            const double total = oracle::integrate(
                [&](double y) { return y <= 0.0 || y >= 1.0 ? 0.0 : truncnorm_pdf(d, y); },
                oracle::linear_breaks(loc, s));
            worst_tn = std::max(worst_tn, std::abs(total - 1.0));
        }
    }
    return {worst_ln <= 1e-6 && worst_tn <= 1e-6,
            fmt("max |integral - 1|: logistic-normal %.3g over 13x8 grid, truncated normal %.3g "
                "over 9x7 grid (tol 1e-6)",
                worst_ln, worst_tn)};
}

Outcome criterion5() {
    double worst = 0.0;
    double printed_worst = 0.0;
    for (double loc : {-1.0, -0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}) {
        for (double s : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0}) {
            const TruncNorm d(loc, s * s);
            const double quad = oracle::integrate(
                [&](double y) { return y * oracle::truncnorm_pdf(loc, s, y); },
                oracle::linear_breaks(loc, s));
            worst = std::max(worst, std::abs(truncnorm_mean(d) - quad));
            // The alternative reading with the correction term scaled by loc.
            const double a = -loc / s;
            const double b = (1.0 - loc) / s;
            const double z = oracle::mass(a, b);
            const double printed = loc - loc * (oracle::phi(b) - oracle::phi(a)) / z;
            printed_worst = std::max(printed_worst, std::abs(printed - quad));
        }
    }
    return {worst <= 1e-8 && printed_worst > 1e-3,
            fmt("closed-form mean vs quadrature over 9x7 (loc,s) grid: max |diff| = %.3g (tol "
                "1e-8); loc-scaled correction variant misses by up to %.3g, so the s-scaled form "
                "is the one confirmed",
                worst, printed_worst)};
}

Outcome criterion6() {
    const auto uniform = GriddedDensity::uniform(512);
    double worst_u = 0.0;
    for (double y : {0.2, 0.5, 0.8}) {
        const double exact = y * y * y / 3.0 + (1.0 - y) * (1.0 - y) * (1.0 - y) / 3.0;
        worst_u = std::max(worst_u, std::abs(crps(uniform, y) - exact));
    }
    double worst_p = 0.0;
    for (double mu : {0.1, 0.37, 0.5, 0.8}) {
        for (double y : {0.05, 0.3, 0.5, 0.77, 0.95}) {
            const TruncNorm point(mu, 1e-8);
            worst_p = std::max(worst_p, std::abs(crps(point, y) - std::abs(y - mu)));
        }
    }
    return {worst_u <= 1e-4 && worst_p <= 1e-3,
            fmt("uniform forecast max |CRPS - (y^3+(1-y)^3)/3| = %.3g (tol 1e-4); point-mass "
                "max |CRPS - |y-mu|| = %.3g (tol 1e-3)",
                worst_u, worst_p)};
}

Outcome criterion7() {
    std::ostringstream detail;
    bool ok = true;

    SimSpec arima;
    arima.model = SimModel::arima111;
    arima.n = 10001;
    arima.seed = 71;
    arima.phi = 0.5;
    arima.theta = -0.7;
    arima.sigma2 = 0.01;
    const auto w1 = simulate_path(arima).increments;
    const auto m1 = fit(ArimaGarchSpec{1, 1, 0, 0, true, 1}, w1);
    const double phi_hat = m1.params.phi[0];
    const double theta_hat = m1.params.theta[0];
    ok = ok && std::abs(phi_hat - 0.5) < 0.05 && std::abs(theta_hat + 0.7) < 0.05;
    detail << fmt("ARIMA(1,1,1) phi=%.3f theta=%.3f (tol 0.05)", phi_hat, theta_hat);

    SimSpec garch;
    garch.model = SimModel::garch11;
    garch.n = 20001;
    garch.seed = 72;
    garch.alpha_g = 0.1;
    garch.beta_g = 0.85;
    garch.omega = 0.05 * 0.01;  // long-run variance 0.01
    const auto w2 = simulate_path(garch).increments;
    const auto m2 = fit(ArimaGarchSpec{0, 0, 1, 1, false, 1}, w2);
    const double a_hat = m2.params.alpha_g[0];
    const double b_hat = m2.params.beta_g[0];
    ok = ok && std::abs(a_hat + b_hat - 0.95) < 0.05 && std::abs(a_hat - 0.1) < 0.07 &&
         std::abs(b_hat - 0.85) < 0.07;
    detail << fmt("; GARCH(1,1) alpha=%.3f beta=%.3f sum=%.3f (sum tol 0.05, each 0.07)", a_hat,
                  b_hat, a_hat + b_hat);

    SimSpec ets = egarch_spec(73);
    ets.n = 10000;
    ets.start = 0.5;
    ets.phi = 0.4;
    ets.theta = 0.3 - 1.0;
    const auto y = simulate(ets);
    const auto m3 = fit_ets(y.values(), true);
    ok = ok && std::abs(m3.params.alpha - 0.3) < 0.07 && std::abs(m3.params.phi_s - 0.4) < 0.07;
    detail << fmt("; ETS 5-parameter alpha=%.3f phi_s=%.3f (tol 0.07)", m3.params.alpha,
                  m3.params.phi_s);
    return {ok, detail.str()};
}

Outcome criterion8() {
    const auto y = simulate(egarch_spec(81));
    BacktestConfig config;
    config.forecasters = {"ets_ann_ec", "ets_ann_ec2"};
    config.split = {kTrainLen, kTestLen};
    config.horizon = 1;
    const auto result = run_backtest(config, y.values());
    const auto& homo = result.forecasters[0];
    const auto& hetero = result.forecasters[1];
    if (!homo.ok || !hetero.ok || !homo.top_decile || !hetero.top_decile) {
        return {false, "forecaster failed: " + homo.error + hetero.error};
    }
    const auto& h1 = homo.top_decile->diagnostics.histogram_20bins;
    const auto n1 = static_cast<double>(homo.top_decile->n_selected);
    const double tails = h1.front() + h1.back();
    const bool u_shaped = tails > 2.0 * (2.0 * n1 / 20.0);

    const auto& h2 = hetero.top_decile->diagnostics.histogram_20bins;
    const std::vector<double> counts(h2.begin(), h2.end());
    const auto chi = chi_square_uniform(counts);
    const bool uniform = chi.p_value >= 0.01;
    return {u_shaped && uniform,
            fmt("top-decile h=1 PIT (n=%zu): ETS(A,N,N) outer bins %.0f vs threshold %.1f; "
                "ETS(A,N,N)-(A,N,N) chi2=%.2f p=%.4f (not rejected at 1%%: %s)",
                homo.top_decile->n_selected, tails, 4.0 * n1 / 20.0, chi.statistic, chi.p_value,
                uniform ? "yes" : "no")};
}

nlohmann::json ranking_config() {
    return {{"forecasters",
             {"persistence", "constant", "climatology", "ewma", "arima", "arima_garch",
              "ets_ann_ec", "ets_ann_ec2"}},
            {"split", {{"train_len", kTrainLen}, {"test_len", kTestLen}}},
            {"horizon", 96},
            {"seed", 91},
            {"clamp_eps", 1e-6}};
}

Outcome criterion9() {
    const auto y = simulate(egarch_spec(91));
    const auto config = config_from_json(ranking_config());
    const auto result = run_backtest(config, y.values());
    auto find = [&](const std::string& id) -> const ForecasterResult& {
        for (const auto& f : result.forecasters)
            if (f.id == id) return f;
        throw std::logic_error("missing " + id);
    };
    for (const auto& f : result.forecasters) {
        if (!f.ok) return {false, f.id + " failed: " + f.error};
    }
    const auto& clim = find("climatology");
    const auto& cons = find("constant");
    std::ostringstream detail;
    bool ok = true;
    for (const std::string id : {"arima", "arima_garch", "ets_ann_ec", "ets_ann_ec2"}) {
        const auto& f = find(id);
        double worst_margin = 1e300;
        int worst_h = 0;
        for (int h = 0; h < 96; ++h) {
            const double bench =
                std::min(clim.per_horizon[h].scores.mean_crps, cons.per_horizon[h].scores.mean_crps);
            const double margin = bench - f.per_horizon[h].scores.mean_crps;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst_h = h + 1;
            }
        }
        ok = ok && worst_margin > 0.0;
        detail << fmt("%s min CRPS margin %.4f at h=%d; ", id.c_str(), worst_margin, worst_h);
    }
    const auto& pers = find("persistence");
    std::vector<double> hs;
    std::vector<double> c;
    for (const auto& h : pers.per_horizon) {
        hs.push_back(h.scores.horizon);
        c.push_back(h.scores.mean_crps);
    }
    const double rho = spearman(hs, c);
    ok = ok && rho > 0.95;
    detail << fmt("persistence Spearman rho(h, CRPS) = %.4f (> 0.95); climatology CRPS %.4f at "
                  "h=1, %.4f at h=96",
                  rho, clim.per_horizon.front().scores.mean_crps,
                  clim.per_horizon.back().scores.mean_crps);
    return {ok, detail.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs the backtest twice into sibling directories and counts differing files.
std::pair<int, int> compare_runs(const BacktestConfig& config, std::span<const double> y,
                                 const fs::path& root) {
    fs::remove_all(root);
    for (const char* run : {"a", "b"}) write_report(run_backtest(config, y), root / run);
    int files = 0;
    int mismatched = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        ++files;
        const auto other = root / "b" / entry.path().filename();
        if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++mismatched;
    }
    for (const auto& entry : fs::directory_iterator(root / "b")) {
        if (!fs::exists(root / "a" / entry.path().filename())) ++mismatched;
    }
    fs::remove_all(root);
    return {files, mismatched};
}

Outcome criterion10() {
    const fs::path root = fs::temp_directory_path() / "windcast_acceptance_determinism";

    const auto full = simulate(egarch_spec(91));
    const auto [files_full, diff_full] =
        compare_runs(config_from_json(ranking_config()), full.values(), root);

    // Shorter run with the per-origin forecast dump enabled.
    auto doc = ranking_config();
    doc["split"] = {{"train_len", 3000}, {"test_len", 1000}};
    doc["dump_forecasts"] = true;
    auto spec = egarch_spec(101);
    spec.n = 4000;
    const auto small = simulate(spec);
    const auto [files_dump, diff_dump] = compare_runs(config_from_json(doc), small.values(), root);

    const bool ok = files_full == 17 && files_dump == 25 && diff_full == 0 && diff_dump == 0;
    return {ok, fmt("full 8-forecaster backtest run twice: %d files, %d differing; run with "
                    "forecast dumps: %d files, %d differing",
                    files_full, diff_full, files_dump, diff_dump)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty()) {
        for (int i = 1; i <= 10; ++i) selected.push_back(i);
    }
    int failures = 0;
    for (int k : selected) {
        if (k < 1 || k > 10) {
            std::fprintf(stderr, "unknown criterion %d\n", k);
            return 2;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[k - 1]();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2d %s  %s [%.1f s]\n", k, out.pass ? "PASS" : "FAIL",
                    out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
