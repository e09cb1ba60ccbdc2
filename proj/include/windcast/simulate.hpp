#pragma once

#include "windcast/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace windcast {

enum class SimModel { arima111, arima111_egarch21, garch11 };
enum class SimSpace { z, bounded };

/**
 * Increment model w_t = mu + phi w_{t-1} + eps_t + theta eps_{t-1}, eps_t = s_t e_t,
 * with e_t i.i.d. N(0,1) and s_t^2 constant (arima111), EGARCH(2,1) in
 * log s^2 (arima111_egarch21) or GARCH(1,1) (garch11). The level y_t (bounded)
 * or z_t (z space, mapped through the logistic) accumulates the increments.
 */
struct SimSpec {
    SimModel model = SimModel::arima111;
    SimSpace space = SimSpace::z;
    std::size_t n = 1000;
    std::uint64_t seed = 1;
    double start = 0.5;  // initial level in (0,1); mapped to logit in z space

    double mu = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double sigma2 = 0.01;

    // log s^2_t = log_var_level + L_t,
    // L_t = (1 - gamma) L_{t-1} + (gamma + phi_v) g(e_{t-1}) - phi_v g(e_{t-2}).
    double gamma = 0.1;
    double phi_v = 0.0;
    double theta_v = 1.0;
    double log_var_level = -6.0;

    double omega = 0.0;
    double alpha_g = 0.0;
    double beta_g = 0.0;

    double clamp_eps = kDefaultClampEps;
    int max_redraws = 100;

    void validate() const;
};

struct Simulation {
    PowerSeries series;
    std::vector<double> increments;      // w_t, t = 1..n-1
    std::vector<double> innovations;     // eps_t
    std::vector<double> innovation_var;  // s_t^2
};

Simulation simulate_path(const SimSpec& spec);
inline PowerSeries simulate(const SimSpec& spec) { return simulate_path(spec).series; }

SimModel parse_sim_model(const std::string& name);
std::string to_string(SimModel m);

}  // namespace windcast
