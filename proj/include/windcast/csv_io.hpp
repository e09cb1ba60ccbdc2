#pragma once

#include "windcast/series.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace windcast {

/// Seconds since 1970-01-01T00:00:00Z. Accepts YYYY-MM-DDTHH:MM[:SS][Z] (or a
/// space instead of T); throws std::invalid_argument otherwise.
std::int64_t parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t epoch_seconds);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

struct PowerCsv {
    std::vector<std::string> timestamps;
    std::vector<double> values;
    bool normalized = false;  // power_norm column instead of power_mw
    int cadence_minutes = 0;
};

/**
 * Reads `timestamp,power_mw` or `timestamp,power_norm`. Timestamps must be
 * strictly increasing on a fixed cadence; gaps are rejected.
 */
PowerCsv read_power_csv(const std::filesystem::path& path);

/// Normalizes power_mw by `capacity` (required for raw data) or clamps power_norm.
PowerSeries to_series(const PowerCsv& csv, std::optional<double> capacity, double clamp_eps);

/// Writes `timestamp,power_norm`; synthetic timestamps start at 2000-01-01 when
/// `timestamps` is empty.
void write_power_csv(const std::filesystem::path& path, const PowerSeries& series,
                     const std::vector<std::string>& timestamps = {});

}  // namespace windcast
