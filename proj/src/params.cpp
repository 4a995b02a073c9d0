#include "polydina/params.hpp"

#include <nlohmann/json.hpp>

namespace polydina {

void validate_param_set(const ParamSet& s, const QMatrix& q) {
    if (s.model == ModelKind::Gpdina)
        validate_gpdina_bounds(s.gpdina, q);
    else
        validate_seq_bounds(s.seq, q);
    validate_proportions(s.p, q.K);
}

std::vector<double> full_distribution(const QMatrix& q, const ParamSet& s) {
    if (s.model == ModelKind::Gpdina) return gpdina_full_distribution(q, s.gpdina, s.p);
    return seq_full_distribution(q, s.seq, s.p);
}

namespace {

nlohmann::json matrix_to_json(const std::vector<std::vector<double>>& m) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : m) out.push_back(row);
    return out;
}

std::vector<std::vector<double>> matrix_from_json(const nlohmann::json& j, const char* field) {
    if (!j.is_array()) fail(Errc::parse, std::string("params JSON: '") + field +
                                             "' must be an array of arrays");
    std::vector<std::vector<double>> out;
    for (const auto& row : j) {
        if (!row.is_array())
            fail(Errc::parse, std::string("params JSON: '") + field +
                                  "' must be an array of arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number())
                fail(Errc::parse, std::string("params JSON: '") + field +
                                      "' entries must be numbers");
            r.push_back(v.get<double>());
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace

std::string param_set_to_json(const ParamSet& s) {
    nlohmann::json j;
    j["model"] = to_string(s.model);
    if (s.model == ModelKind::Gpdina) {
        j["theta_plus"] = matrix_to_json(s.gpdina.theta_plus);
        j["theta_minus"] = matrix_to_json(s.gpdina.theta_minus);
    } else {
        j["beta_plus"] = matrix_to_json(s.seq.beta_plus);
        j["beta_minus"] = matrix_to_json(s.seq.beta_minus);
    }
    j["p"] = s.p;
    return j.dump(2);
}

ParamSet param_set_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse, std::string("params JSON unreadable: ") + e.what());
    }
    if (!j.is_object() || !j.contains("model") || !j["model"].is_string())
        fail(Errc::parse, "params JSON: missing string field 'model'");
    ParamSet s;
    s.model = model_kind_from_string(j["model"].get<std::string>());
    if (s.model == ModelKind::Gpdina) {
        if (!j.contains("theta_plus") || !j.contains("theta_minus"))
            fail(Errc::parse, "params JSON: gpdina needs 'theta_plus' and 'theta_minus'");
        s.gpdina.theta_plus = matrix_from_json(j["theta_plus"], "theta_plus");
        s.gpdina.theta_minus = matrix_from_json(j["theta_minus"], "theta_minus");
    } else {
        if (!j.contains("beta_plus") || !j.contains("beta_minus"))
            fail(Errc::parse, "params JSON: seq needs 'beta_plus' and 'beta_minus'");
        s.seq.beta_plus = matrix_from_json(j["beta_plus"], "beta_plus");
        s.seq.beta_minus = matrix_from_json(j["beta_minus"], "beta_minus");
    }
    if (!j.contains("p") || !j["p"].is_array())
        fail(Errc::parse, "params JSON: missing array field 'p'");
    for (const auto& v : j["p"]) {
        if (!v.is_number()) fail(Errc::parse, "params JSON: 'p' entries must be numbers");
        s.p.push_back(v.get<double>());
    }
    return s;
}

} // namespace polydina
