#include "windcast/model_io.hpp"

#include <stdexcept>

namespace windcast {

using nlohmann::json;

json to_json(const ArimaGarchSpec& spec) {
    return {{"p", spec.p},
            {"q", spec.q},
            {"r", spec.r},
            {"s", spec.s},
            {"d", spec.d},
            {"constant_variance", spec.constant_variance}};
}

json to_json(const ArimaGarchParams& params) {
    return {{"mu", params.mu},
            {"phi", params.phi},
            {"theta", params.theta},
            {"omega", params.omega},
            {"alpha_g", params.alpha_g},
            {"beta_g", params.beta_g},
            {"sigma2_const", params.sigma2_const}};
}

json to_json(const FitReport& report) {
    return {{"loglik", report.loglik},
            {"bic", report.bic},
            {"n_params", report.n_params},
            {"n_obs", report.n_obs},
            {"converged", report.converged}};
}

json to_json(const EtsParams& params) {
    json j = {{"with_variance", params.with_variance},
              {"alpha", params.alpha},
              {"phi_s", params.phi_s},
              {"init_log_v", params.init_log_v}};
    if (params.with_variance) {
        j["gamma"] = params.gamma;
        j["phi_v"] = params.phi_v;
        j["theta_v"] = params.theta_v;
        j["g_bar"] = params.g_bar;
    } else {
        j["s2_eps"] = params.s2_eps;
    }
    return j;
}

json to_json(const ModelEnvelope& env) {
    json j;
    if (const auto* m = std::get_if<ArimaGarchModel>(&env.model)) {
        j["type"] = m->spec.constant_variance ? "arima" : "arima_garch";
        j["spec"] = to_json(m->spec);
        j["params"] = to_json(m->params);
        j["params"]["presample_var"] = m->presample_var;
        j["fit_report"] = to_json(m->report);
    } else {
        const auto& e = std::get<EtsModel>(env.model);
        j["type"] = e.params.with_variance ? "ets_ann_ec2" : "ets_ann_ec";
        j["spec"] = {{"with_variance", e.params.with_variance}};
        j["params"] = to_json(e.params);
        j["fit_report"] = to_json(e.report);
    }
    j["clamp_eps"] = env.clamp_eps;
    j["train_window"] = {{"start", env.train_window.start}, {"length", env.train_window.length}};
    return j;
}

ArimaGarchSpec spec_from_json(const json& j) {
    ArimaGarchSpec spec;
    spec.p = j.value("p", 0);
    spec.q = j.value("q", 0);
    spec.r = j.value("r", 0);
    spec.s = j.value("s", 0);
    spec.d = j.value("d", 1);
    spec.constant_variance = j.value("constant_variance", spec.r == 0 && spec.s == 0);
    spec.validate();
    return spec;
}

namespace {

FitReport report_from_json(const json& j) {
    FitReport r;
    r.loglik = j.at("loglik").get<double>();
    r.bic = j.at("bic").get<double>();
    r.n_params = j.at("n_params").get<int>();
    r.n_obs = j.at("n_obs").get<int>();
    r.converged = j.at("converged").get<bool>();
    return r;
}

}  // namespace

ModelEnvelope envelope_from_json(const json& j) {
    ModelEnvelope env;
    const auto type = j.at("type").get<std::string>();
    if (type == "arima" || type == "arima_garch") {
        ArimaGarchModel m;
        m.spec = spec_from_json(j.at("spec"));
        const auto& p = j.at("params");
        m.params.mu = p.at("mu").get<double>();
        m.params.phi = p.at("phi").get<std::vector<double>>();
        m.params.theta = p.at("theta").get<std::vector<double>>();
        m.params.omega = p.at("omega").get<double>();
        m.params.alpha_g = p.at("alpha_g").get<std::vector<double>>();
        m.params.beta_g = p.at("beta_g").get<std::vector<double>>();
        m.params.sigma2_const = p.at("sigma2_const").get<double>();
        m.presample_var = p.value("presample_var", 1.0);
        m.report = report_from_json(j.at("fit_report"));
        check_params(m.spec, m.params);
        env.model = std::move(m);
    } else if (type == "ets_ann_ec" || type == "ets_ann_ec2") {
        EtsModel e;
        const auto& p = j.at("params");
        e.params.with_variance = p.at("with_variance").get<bool>();
        e.params.alpha = p.at("alpha").get<double>();
        e.params.phi_s = p.at("phi_s").get<double>();
        e.params.init_log_v = p.value("init_log_v", 0.0);
        if (e.params.with_variance) {
            e.params.gamma = p.at("gamma").get<double>();
            e.params.phi_v = p.at("phi_v").get<double>();
            e.params.theta_v = p.at("theta_v").get<double>();
            e.params.g_bar = p.value("g_bar", 0.0);
        } else {
            e.params.s2_eps = p.at("s2_eps").get<double>();
        }
        e.params.validate();
        e.report = report_from_json(j.at("fit_report"));
        env.model = e;
    } else {
        throw std::invalid_argument("unknown model type: " + type);
    }
    env.clamp_eps = j.value("clamp_eps", 1e-6);
    if (j.contains("train_window")) {
        env.train_window.start = j["train_window"].value("start", std::size_t{0});
        env.train_window.length = j["train_window"].value("length", std::size_t{0});
    }
    return env;
}

std::string dump_model(const ModelEnvelope& env) { return to_json(env).dump(2) + "\n"; }

ModelEnvelope parse_model(const std::string& text) { return envelope_from_json(json::parse(text)); }

SimSpec sim_spec_from_json(const json& j) {
    SimSpec s;
    if (j.contains("model")) s.model = parse_sim_model(j["model"].get<std::string>());
    const auto space = j.value("space", std::string("z"));
    if (space == "z") {
        s.space = SimSpace::z;
    } else if (space == "bounded") {
        s.space = SimSpace::bounded;
    } else {
        throw std::invalid_argument("unknown simulation space: " + space);
    }
    s.n = j.value("n", s.n);
    s.seed = j.value("seed", s.seed);
    s.start = j.value("start", s.start);
    s.mu = j.value("mu", s.mu);
    s.phi = j.value("phi", s.phi);
    s.theta = j.value("theta", s.theta);
    s.sigma2 = j.value("sigma2", s.sigma2);
    s.gamma = j.value("gamma", s.gamma);
    s.phi_v = j.value("phi_v", s.phi_v);
    s.theta_v = j.value("theta_v", s.theta_v);
    s.log_var_level = j.value("log_var_level", s.log_var_level);
    s.omega = j.value("omega", s.omega);
    s.alpha_g = j.value("alpha_g", s.alpha_g);
    s.beta_g = j.value("beta_g", s.beta_g);
    s.clamp_eps = j.value("clamp_eps", s.clamp_eps);
    s.max_redraws = j.value("max_redraws", s.max_redraws);
    s.validate();
    return s;
}

json to_json(const SimSpec& s) {
    return {{"model", to_string(s.model)},
            {"space", s.space == SimSpace::z ? "z" : "bounded"},
            {"n", s.n},
            {"seed", s.seed},
            {"start", s.start},
            {"mu", s.mu},
            {"phi", s.phi},
            {"theta", s.theta},
            {"sigma2", s.sigma2},
            {"gamma", s.gamma},
            {"phi_v", s.phi_v},
            {"theta_v", s.theta_v},
            {"log_var_level", s.log_var_level},
            {"omega", s.omega},
            {"alpha_g", s.alpha_g},
            {"beta_g", s.beta_g},
            {"clamp_eps", s.clamp_eps},
            {"max_redraws", s.max_redraws}};
}

}  // namespace windcast
