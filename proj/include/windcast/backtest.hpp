#pragma once

#include "windcast/scoring.hpp"
#include "windcast/series.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace windcast {

struct BacktestConfig {
    std::vector<std::string> forecasters;
    SplitSpec split;
    int horizon = 96;
    std::size_t refit_interval = 0;  // 0 = never
    std::uint64_t seed = 1;
    double clamp_eps = kDefaultClampEps;
    /// Per-forecaster option objects keyed by id.
    nlohmann::json options = nlohmann::json::object();
    bool dump_forecasts = false;

    void validate(std::size_t series_len) const;
};

/// Reads the backtest fields of a config document (data source keys are ignored).
BacktestConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BacktestConfig& config);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Per-origin cells for one horizon, ordered by origin.
struct HorizonCells {
    std::vector<std::size_t> origin;
    std::vector<double> obs;
    std::vector<double> point;
    std::vector<double> crps;
    std::vector<double> nll;
    std::vector<double> pit;
};

struct HorizonResult {
    ScoreReport scores;
    PitDiagnostics pit;
    int nll_clamped = 0;
};

struct ForecasterResult {
    std::string id;
    bool ok = false;
    std::string error;
    nlohmann::json fit_report;
    std::vector<HorizonResult> per_horizon;
    /// h = 1 PIT restricted to the top decile of realized variance at the origin.
    std::optional<ConditionalPit> top_decile;
    /// Kept only when the config asks for a forecast dump.
    std::vector<HorizonCells> cells;
};

struct BacktestResult {
    nlohmann::json config;
    std::string config_hash;
    std::vector<ForecasterResult> forecasters;
};

/**
 * Rolling-origin evaluation. Origins run from train_len - 1 to
 * train_len + test_len - 2 (0-based); horizon h at origin t is scored only when
 * t + h lies inside the test window, so horizon h has test_len - h + 1 cells.
 */
BacktestResult run_backtest(const BacktestConfig& config, std::span<const double> y);

/// Aggregates cells the same way run_backtest does.
HorizonResult aggregate(int horizon, const HorizonCells& cells);

}  // namespace windcast
