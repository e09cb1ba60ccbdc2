#pragma once

#include "windcast/density.hpp"

#include "json.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace windcast {

/// Receives the densities issued at origin t: one per horizon, or a single
/// density reused for every horizon when the forecaster is horizon invariant.
using ForecastSink = std::function<void(std::size_t origin, std::span<const DensityForecast>)>;

class Forecaster {
public:
    virtual ~Forecaster() = default;

    virtual std::string id() const = 0;
    virtual bool horizon_invariant() const = 0;
    /// Estimates parameters on the training window; throws on failure.
    virtual void fit(std::span<const double> train) = 0;
    virtual nlohmann::json fit_report() const = 0;
    /// Visits origins first..last of `y` in order; history is y[0..t].
    virtual void run(std::span<const double> y, std::size_t first, std::size_t last, int horizon,
                     const ForecastSink& sink) const = 0;
};

const std::vector<std::string>& forecaster_ids();

/// `options` is the per-forecaster object of the backtest config (may be null).
std::unique_ptr<Forecaster> make_forecaster(const std::string& id, const nlohmann::json& options,
                                            double clamp_eps);

}  // namespace windcast
