#include "windcast/simulate.hpp"

#include "windcast/ets.hpp"
#include "windcast/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace windcast {

void SimSpec::validate() const {
    if (n < 2) throw std::invalid_argument("simulation length must be at least 2");
    if (!(start > 0.0 && start < 1.0)) throw std::invalid_argument("start level must lie in (0,1)");
    if (!(std::abs(phi) < 1.0)) throw std::invalid_argument("phi must lie in (-1,1)");
    if (!(std::abs(theta) < 1.0)) throw std::invalid_argument("theta must lie in (-1,1)");
    if (!(clamp_eps > 0.0 && clamp_eps <= 1e-3)) {
        throw std::invalid_argument("clamp_eps must lie in (0, 1e-3]");
    }
    if (max_redraws < 0) throw std::invalid_argument("max_redraws must be nonnegative");
    switch (model) {
        case SimModel::arima111:
            if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
            break;
        case SimModel::arima111_egarch21:
            if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
            if (!(std::abs(phi_v) < 1.0)) throw std::invalid_argument("phi_v must lie in (-1,1)");
            if (!(theta_v > 0.0)) throw std::invalid_argument("theta_v must be positive");
            break;
        case SimModel::garch11:
            if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
            if (alpha_g < 0.0 || beta_g < 0.0 || !(alpha_g + beta_g < 1.0)) {
                throw std::invalid_argument("GARCH(1,1) needs alpha, beta >= 0 and alpha + beta < 1");
            }
            break;
    }
}

Simulation simulate_path(const SimSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    const bool bounded = spec.space == SimSpace::bounded;
    const double lo = spec.clamp_eps;
    const double hi = 1.0 - spec.clamp_eps;

    std::vector<double> y(spec.n);
    Simulation sim{PowerSeries({0.5, 0.5}, 15, 1.0), {}, {}, {}};
    sim.increments.reserve(spec.n - 1);
    sim.innovations.reserve(spec.n - 1);
    sim.innovation_var.reserve(spec.n - 1);

    double level = bounded ? spec.start : logistic_fwd(spec.start);
    y[0] = spec.start;
    double w_prev = 0.0;
    double eps_prev = 0.0;
    double log_state = 0.0;  // L_t of the EGARCH recursion
    double g1 = 0.0;         // g(e_{t-1})
    double g2 = 0.0;         // g(e_{t-2})
    double s2_prev = spec.model == SimModel::garch11
                         ? spec.omega / (1.0 - spec.alpha_g - spec.beta_g)
                         : spec.sigma2;

    for (std::size_t t = 1; t < spec.n; ++t) {
        double s2 = spec.sigma2;
        if (spec.model == SimModel::arima111_egarch21) {
            log_state = (1.0 - spec.gamma) * log_state + (spec.gamma + spec.phi_v) * g1 -
                        spec.phi_v * g2;
            s2 = std::exp(std::clamp(spec.log_var_level + log_state, -50.0, 50.0));
        } else if (spec.model == SimModel::garch11) {
            s2 = spec.omega + spec.alpha_g * eps_prev * eps_prev + spec.beta_g * s2_prev;
        }
        const double s = std::sqrt(s2);
        const double mean_w = spec.mu + spec.phi * w_prev + spec.theta * eps_prev;

        double e = normal(rng);
        double next = level + mean_w + s * e;
        if (bounded) {
            int tries = 0;
            while (!(next > lo && next < hi)) {
                if (++tries > spec.max_redraws) {
                    std::ostringstream msg;
                    msg << "simulate: level left (0,1) at step " << t << " after "
                        << spec.max_redraws << " redraws (previous level " << level
                        << ", conditional mean " << level + mean_w << ", scale " << s << ")";
                    throw std::runtime_error(msg.str());
                }
                e = normal(rng);
                next = level + mean_w + s * e;
            }
        }

        const double eps = s * e;
        const double w = mean_w + eps;
        level = next;
        y[t] = bounded ? level : std::clamp(logistic_inv(level), lo, hi);

        sim.increments.push_back(w);
        sim.innovations.push_back(eps);
        sim.innovation_var.push_back(s2);
        w_prev = w;
        eps_prev = eps;
        s2_prev = s2;
        g2 = g1;
        g1 = g_func(e, spec.theta_v);
    }
    sim.series = PowerSeries(std::move(y), 15, 1.0);
    return sim;
}

SimModel parse_sim_model(const std::string& name) {
    if (name == "arima111") return SimModel::arima111;
    if (name == "arima111_egarch21") return SimModel::arima111_egarch21;
    if (name == "garch11") return SimModel::garch11;
    throw std::invalid_argument("unknown simulation model: " + name);
}

std::string to_string(SimModel m) {
    switch (m) {
        case SimModel::arima111: return "arima111";
        case SimModel::arima111_egarch21: return "arima111_egarch21";
        case SimModel::garch11: return "garch11";
    }
    return "unknown";
}

}  // namespace windcast
