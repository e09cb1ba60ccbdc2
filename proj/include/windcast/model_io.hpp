#pragma once

#include "windcast/arima_garch.hpp"
#include "windcast/ets.hpp"
#include "windcast/simulate.hpp"

#include "json.hpp"

#include <cstddef>
#include <string>
#include <variant>

namespace windcast {

struct TrainWindow {
    std::size_t start = 0;
    std::size_t length = 0;
};

/// Type-tagged model document: {type, spec, params, fit_report, clamp_eps, train_window}.
struct ModelEnvelope {
    std::variant<ArimaGarchModel, EtsModel> model;
    double clamp_eps = 1e-6;
    TrainWindow train_window;
};

nlohmann::json to_json(const ArimaGarchSpec& spec);
nlohmann::json to_json(const ArimaGarchParams& params);
nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const EtsParams& params);
nlohmann::json to_json(const ModelEnvelope& env);

ArimaGarchSpec spec_from_json(const nlohmann::json& j);
ModelEnvelope envelope_from_json(const nlohmann::json& j);

/// Shortest round-trip text for every double.
std::string dump_model(const ModelEnvelope& env);
ModelEnvelope parse_model(const std::string& text);

/// Missing keys keep their SimSpec defaults; `space` is "z" or "bounded".
SimSpec sim_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimSpec& spec);

}  // namespace windcast
