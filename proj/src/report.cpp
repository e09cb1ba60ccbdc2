#include "windcast/report.hpp"

#include "windcast/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace windcast {

using nlohmann::json;

namespace {

json scores_json(const ScoreReport& s) {
    return {{"horizon", s.horizon}, {"mae", s.mae},       {"rmse", s.rmse},
            {"crps", s.mean_crps},  {"nll", s.mean_nll}, {"n", s.n}};
}

json pit_json(const PitDiagnostics& d) {
    return {{"p5", d.p5},
            {"p50", d.p50},
            {"p95", d.p95},
            {"dev5", d.dev5},
            {"dev50", d.dev50},
            {"dev95", d.dev95},
            {"histogram_20bins", d.histogram_20bins},
            {"ks_stat", d.ks_stat},
            {"ks_pvalue", d.ks_pvalue}};
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_scores(const ForecasterResult& f, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "horizon,mae,rmse,crps,nll,n\n";
    for (const auto& h : f.per_horizon) {
        const auto& s = h.scores;
        out << s.horizon << ',' << format_double(s.mae) << ',' << format_double(s.rmse) << ','
            << format_double(s.mean_crps) << ',' << format_double(s.mean_nll) << ',' << s.n << '\n';
    }
    close_out(out, path);
}

void write_pit(const ForecasterResult& f, const std::filesystem::path& path) {
    json j;
    j["id"] = f.id;
    json per = json::array();
    for (const auto& h : f.per_horizon) {
        json e = pit_json(h.pit);
        e["horizon"] = h.scores.horizon;
        e["nll_clamped"] = h.nll_clamped;
        per.push_back(std::move(e));
    }
    j["per_horizon"] = std::move(per);
    if (!f.per_horizon.empty()) j["h1_pit_values"] = f.per_horizon.front().pit.pit_values;
    if (f.top_decile) {
        json t = pit_json(f.top_decile->diagnostics);
        t["n_selected"] = f.top_decile->n_selected;
        t["threshold"] = f.top_decile->threshold;
        t["low_power"] = f.top_decile->low_power;
        t["pit_values"] = f.top_decile->diagnostics.pit_values;
        j["top_decile_h1"] = std::move(t);
    }
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    close_out(out, path);
}

void write_dump(const ForecasterResult& f, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "origin,horizon,obs,point,crps,nll,pit\n";
    for (std::size_t h = 0; h < f.cells.size(); ++h) {
        const auto& c = f.cells[h];
        for (std::size_t k = 0; k < c.obs.size(); ++k) {
            out << c.origin[k] << ',' << h + 1 << ',' << format_double(c.obs[k]) << ','
                << format_double(c.point[k]) << ',' << format_double(c.crps[k]) << ','
                << format_double(c.nll[k]) << ',' << format_double(c.pit[k]) << '\n';
        }
    }
    close_out(out, path);
}

template <typename T>
T parse_field(std::string_view s) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw std::invalid_argument("bad field in forecast dump: " + std::string(s));
    }
    return v;
}

}  // namespace

json summary_json(const BacktestResult& result) {
    json j;
    j["config_hash"] = result.config_hash;
    j["config"] = result.config;
    json list = json::array();
    for (const auto& f : result.forecasters) {
        json e = {{"id", f.id}, {"fit_report", f.fit_report}};
        if (!f.ok) e["error"] = f.error;
        json per = json::array();
        for (const auto& h : f.per_horizon) per.push_back(scores_json(h.scores));
        e["per_horizon"] = std::move(per);
        list.push_back(std::move(e));
    }
    j["forecasters"] = std::move(list);
    return j;
}

void write_report(const BacktestResult& result, const std::filesystem::path& out_dir) {
    if (result.forecasters.empty()) throw std::invalid_argument("report: no forecaster results");
    std::filesystem::create_directories(out_dir);
    for (const auto& f : result.forecasters) {
        if (!f.ok) continue;
        write_scores(f, out_dir / ("scores_" + f.id + ".csv"));
        write_pit(f, out_dir / ("pit_" + f.id + ".json"));
        if (!f.cells.empty()) write_dump(f, out_dir / ("forecasts_" + f.id + ".csv"));
    }
    const auto path = out_dir / "summary.json";
    auto out = open_out(path);
    out << summary_json(result).dump(2) << '\n';
    close_out(out, path);
}

std::vector<HorizonCells> read_forecast_dump(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (line != "origin,horizon,obs,point,crps,nll,pit") {
        throw std::invalid_argument(path.string() + ": not a forecast dump");
    }
    std::vector<HorizonCells> cells;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::string_view row(line);
        std::string_view f[7];
        for (int i = 0; i < 7; ++i) {
            const auto comma = row.find(',');
            if ((comma == std::string_view::npos) != (i == 6)) {
                throw std::invalid_argument("forecast dump: expected 7 fields");
            }
            f[i] = row.substr(0, comma);
            if (i < 6) row.remove_prefix(comma + 1);
        }
        const auto h = parse_field<std::size_t>(f[1]);
        if (h == 0) throw std::invalid_argument("forecast dump: horizon must be >= 1");
        if (cells.size() < h) cells.resize(h);
        auto& c = cells[h - 1];
        c.origin.push_back(parse_field<std::size_t>(f[0]));
        c.obs.push_back(parse_field<double>(f[2]));
        c.point.push_back(parse_field<double>(f[3]));
        c.crps.push_back(parse_field<double>(f[4]));
        c.nll.push_back(parse_field<double>(f[5]));
        c.pit.push_back(parse_field<double>(f[6]));
    }
    return cells;
}

}  // namespace windcast
