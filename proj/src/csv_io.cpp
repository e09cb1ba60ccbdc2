#include "windcast/csv_io.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace windcast {

namespace {

int parse_int(std::string_view s, std::string_view what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad " + std::string(what) + " in timestamp");
    }
    return v;
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" +
                                    std::string(s) + "'");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::int64_t parse_iso8601(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    if (text.size() != 16 && text.size() != 19) {
        throw std::invalid_argument("unsupported timestamp format: " + std::string(text));
    }
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':' || (text.size() == 19 && text[16] != ':')) {
        throw std::invalid_argument("unsupported timestamp format: " + std::string(text));
    }
    using namespace std::chrono;
    const int y = parse_int(text.substr(0, 4), "year");
    const int mo = parse_int(text.substr(5, 2), "month");
    const int d = parse_int(text.substr(8, 2), "day");
    const int hh = parse_int(text.substr(11, 2), "hour");
    const int mm = parse_int(text.substr(14, 2), "minute");
    const int ss = text.size() == 19 ? parse_int(text.substr(17, 2), "second") : 0;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59) {
        throw std::invalid_argument("invalid calendar timestamp: " + std::string(text));
    }
    const auto days = sys_days{ymd}.time_since_epoch().count();
    return static_cast<std::int64_t>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_iso8601(std::int64_t epoch_seconds) {
    using namespace std::chrono;
    const auto days = epoch_seconds >= 0 ? epoch_seconds / 86400 : (epoch_seconds - 86399) / 86400;
    const auto secs = epoch_seconds - days * 86400;
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(secs / 3600), static_cast<int>(secs % 3600 / 60),
                  static_cast<int>(secs % 60));
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return {buf, ptr};
}

PowerCsv read_power_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path.string() + ": empty file");

    PowerCsv csv;
    const auto header = trim(line);
    if (header == "timestamp,power_mw") {
        csv.normalized = false;
    } else if (header == "timestamp,power_norm") {
        csv.normalized = true;
    } else {
        throw std::invalid_argument(path.string() +
                                    ": header must be timestamp,power_mw or timestamp,power_norm");
    }

    std::int64_t prev = 0;
    std::int64_t step = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto row = trim(line);
        if (row.empty()) continue;
        const auto comma = row.find(',');
        if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 2 fields");
        }
        const auto ts_text = trim(row.substr(0, comma));
        const std::int64_t ts = parse_iso8601(ts_text);
        const double v = parse_double(trim(row.substr(comma + 1)), line_no);
        if (!csv.timestamps.empty()) {
            const std::int64_t diff = ts - prev;
            if (diff <= 0) {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": timestamps must be strictly increasing");
            }
            if (step == 0) {
                step = diff;
            } else if (diff != step) {
                throw std::invalid_argument("line " + std::to_string(line_no) +
                                            ": cadence break (missing or irregular timestamp)");
            }
        }
        prev = ts;
        csv.timestamps.emplace_back(ts_text);
        csv.values.push_back(v);
    }
    if (csv.values.size() < 2) throw std::invalid_argument(path.string() + ": need at least 2 rows");
    if (step % 60 != 0) throw std::invalid_argument("cadence must be a whole number of minutes");
    csv.cadence_minutes = static_cast<int>(step / 60);
    return csv;
}

PowerSeries to_series(const PowerCsv& csv, std::optional<double> capacity, double clamp_eps) {
    if (csv.normalized) {
        std::vector<double> v = normalize_values(csv.values, 1.0, clamp_eps);
        return PowerSeries(std::move(v), csv.cadence_minutes, capacity.value_or(1.0));
    }
    if (!capacity) throw std::invalid_argument("raw power_mw data needs a capacity");
    return PowerSeries(normalize_values(csv.values, *capacity, clamp_eps), csv.cadence_minutes,
                       *capacity);
}

void write_power_csv(const std::filesystem::path& path, const PowerSeries& series,
                     const std::vector<std::string>& timestamps) {
    if (!timestamps.empty() && timestamps.size() != series.size()) {
        throw std::invalid_argument("timestamp count does not match series length");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "timestamp,power_norm\n";
    const std::int64_t origin = parse_iso8601("2000-01-01T00:00:00");
    const std::int64_t step = static_cast<std::int64_t>(series.cadence_minutes()) * 60;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto ts = timestamps.empty()
                            ? format_iso8601(origin + static_cast<std::int64_t>(i) * step)
                            : timestamps[i];
        out << ts << ',' << format_double(series[i]) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace windcast
