#include "windcast/backtest.hpp"
#include "windcast/csv_io.hpp"
#include "windcast/forecasters.hpp"
#include "windcast/model_io.hpp"
#include "windcast/report.hpp"
#include "windcast/simulate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace windcast;

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

PowerSeries load_series(const fs::path& csv, std::optional<double> capacity, double clamp_eps) {
    return to_series(read_power_csv(csv), capacity, clamp_eps);
}

/// `data` is {"csv": path, "capacity": MW} or {"simulate": SimSpec}.
PowerSeries load_data(const json& data, const fs::path& base, std::uint64_t seed, double clamp_eps) {
    if (data.contains("simulate")) {
        json spec = data["simulate"];
        if (!spec.contains("seed")) spec["seed"] = seed;
        return simulate(sim_spec_from_json(spec));
    }
    fs::path csv = data.at("csv").get<std::string>();
    if (csv.is_relative()) csv = base / csv;
    std::optional<double> capacity;
    if (data.contains("capacity")) capacity = data["capacity"].get<double>();
    return load_series(csv, capacity, clamp_eps);
}

int cmd_ingest(const fs::path& csv_path, std::optional<double> capacity, double clamp_eps,
               const std::string& out) {
    const auto csv = read_power_csv(csv_path);
    const auto series = to_series(csv, capacity, clamp_eps);
    const auto v = series.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    const json summary = {{"n", series.size()},
                          {"cadence_minutes", series.cadence_minutes()},
                          {"capacity", series.capacity()},
                          {"first", csv.timestamps.front()},
                          {"last", csv.timestamps.back()},
                          {"min", *lo},
                          {"max", *hi},
                          {"mean", mean}};
    std::cout << summary.dump(2) << '\n';
    if (!out.empty()) write_power_csv(out, series, csv.timestamps);
    return 0;
}

int cmd_fit(const std::string& model, std::size_t train_len, const fs::path& data,
            std::optional<double> capacity, double clamp_eps, const std::string& options_path,
            const std::string& out) {
    const auto series = load_series(data, capacity, clamp_eps);
    if (train_len < 2 || train_len > series.size()) {
        throw std::invalid_argument("--train-len must be in [2, series length]");
    }
    const json options = options_path.empty() ? json::object() : read_json(options_path);
    auto f = make_forecaster(model, options, clamp_eps);
    f->fit(series.values().first(train_len));
    const auto text = f->fit_report().dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream o(out);
        o << text;
        if (!o) throw std::runtime_error("cannot write " + out);
    }
    return 0;
}

int cmd_backtest(const fs::path& config_path, const std::string& out_override) {
    const json doc = read_json(config_path);
    const auto config = config_from_json(doc);
    const auto series = load_data(doc.at("data"), config_path.parent_path(), config.seed,
                                  config.clamp_eps);
    auto result = run_backtest(config, series.values());
    result.config = doc;
    result.config_hash = config_hash(doc);
    fs::path out = out_override.empty() ? fs::path(doc.value("out_dir", std::string("results")))
                                        : fs::path(out_override);
    if (out.is_relative() && out_override.empty()) out = config_path.parent_path() / out;
    write_report(result, out);
    int failed = 0;
    for (const auto& f : result.forecasters) {
        if (f.ok) continue;
        ++failed;
        std::cerr << "forecaster " << f.id << " failed: " << f.error << '\n';
    }
    std::cout << "wrote " << out.string() << " (config " << result.config_hash << ")\n";
    return failed == static_cast<int>(result.forecasters.size()) ? 1 : 0;
}

int cmd_simulate(const fs::path& spec_path, const fs::path& out) {
    const auto spec = sim_spec_from_json(read_json(spec_path));
    write_power_csv(out, simulate(spec));
    return 0;
}

int cmd_report(const fs::path& dir) {
    const json summary = read_json(dir / "summary.json");
    std::cout << "config " << summary.at("config_hash").get<std::string>() << "\n\n";
    std::printf("%-14s %4s %10s %10s %10s %10s %6s\n", "forecaster", "h", "mae", "rmse", "crps",
                "nll", "n");
    for (const auto& f : summary.at("forecasters")) {
        const auto id = f.at("id").get<std::string>();
        if (f.contains("error")) {
            std::printf("%-14s failed: %s\n", id.c_str(), f["error"].get<std::string>().c_str());
            continue;
        }
        for (const auto& h : f.at("per_horizon")) {
            const int hz = h.at("horizon").get<int>();
            if (hz != 1 && hz != 4 && hz != 24 && hz != 48 && hz != 96) continue;
            std::printf("%-14s %4d %10.5f %10.5f %10.5f %10.4f %6d\n", id.c_str(), hz,
                        h.at("mae").get<double>(), h.at("rmse").get<double>(),
                        h.at("crps").get<double>(), h.at("nll").get<double>(),
                        h.at("n").get<int>());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"windcast: density forecasting for normalized wind power"};
    app.require_subcommand(1);

    std::string csv;
    std::optional<double> capacity;
    double clamp_eps = kDefaultClampEps;
    std::string out;
    auto* ingest = app.add_subcommand("ingest", "validate and normalize a power CSV");
    ingest->add_option("csv", csv, "timestamp,power_mw or timestamp,power_norm file")->required();
    ingest->add_option("--capacity", capacity, "installed capacity in MW");
    ingest->add_option("--clamp-eps", clamp_eps, "clamp normalized values into [eps, 1-eps]");
    ingest->add_option("--out", out, "write the normalized series here");

    std::string model;
    std::size_t train_len = 0;
    std::string options_path;
    auto* fit = app.add_subcommand("fit", "fit one forecaster on the leading training window");
    fit->add_option("--model", model, "forecaster id")
        ->required()
        ->check(CLI::IsMember(forecaster_ids()));
    fit->add_option("--train-len", train_len, "training length")->required();
    fit->add_option("--data", csv, "power CSV")->required();
    fit->add_option("--capacity", capacity, "installed capacity in MW");
    fit->add_option("--clamp-eps", clamp_eps, "clamp normalized values into [eps, 1-eps]");
    fit->add_option("--options", options_path, "JSON file with forecaster options");
    fit->add_option("--out", out, "write the model JSON here instead of stdout");

    std::string config;
    auto* backtest = app.add_subcommand("backtest", "rolling-origin evaluation");
    backtest->add_option("--config", config, "backtest JSON")->required();
    backtest->add_option("--out", out, "output directory (overrides out_dir)");

    std::string spec;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic series");
    sim->add_option("--spec", spec, "simulation JSON")->required();
    sim->add_option("--out", out, "output CSV")->required();

    std::string in;
    auto* report = app.add_subcommand("report", "print a score table from a backtest directory");
    report->add_option("--in", in, "backtest output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(csv, capacity, clamp_eps, out);
        if (*fit) return cmd_fit(model, train_len, csv, capacity, clamp_eps, options_path, out);
        if (*backtest) return cmd_backtest(config, out);
        if (*sim) return cmd_simulate(spec, out);
        if (*report) return cmd_report(in);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
