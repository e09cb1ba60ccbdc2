#pragma once

#include "windcast/backtest.hpp"

#include <filesystem>
#include <vector>

namespace windcast {

/**
 * Writes scores_<id>.csv and pit_<id>.json for every forecaster that ran,
 * forecasts_<id>.csv when cells were kept, and summary.json. Output carries no
 * timestamps, so identical results give identical bytes.
 */
void write_report(const BacktestResult& result, const std::filesystem::path& out_dir);

nlohmann::json summary_json(const BacktestResult& result);

/// Reads forecasts_<id>.csv back into per-horizon cells (index h - 1).
std::vector<HorizonCells> read_forecast_dump(const std::filesystem::path& path);

}  // namespace windcast
