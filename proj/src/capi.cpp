#include "polydina/polydina_c.h"

#include <cmath>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "polydina/conditions.hpp"
#include "polydina/datasets.hpp"
#include "polydina/equivalence.hpp"
#include "polydina/estimate.hpp"
#include "polydina/identnum.hpp"
#include "polydina/params.hpp"

using namespace polydina;

struct polydina_q {
    QMatrix q;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

template <typename Fn>
int wrap(Fn&& fn) {
    try {
        fn();
        return POLYDINA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return POLYDINA_ERR_NUMERIC;
    }
}

void require(bool ok, const char* what) {
    if (!ok) fail(Errc::invalid_argument, what);
}

ParamSet parse_params_for(const QMatrix& q, const char* params_json) {
    require(params_json != nullptr, "params JSON must not be NULL");
    ParamSet s = param_set_from_json(params_json);
    validate_param_set(s, q);
    return s;
}

} // namespace

extern "C" {

const char* polydina_version(void) { return "1.0.0"; }

const char* polydina_last_error(void) { return g_last_error.c_str(); }

void polydina_string_free(char* text) { delete[] text; }

int polydina_q_parse(const char* csv, const char* model, polydina_q** out) {
    return wrap([&] {
        require(csv && model && out, "csv, model and out must not be NULL");
        QMatrix q = parse_q_matrix(csv, model_kind_from_string(model));
        *out = new polydina_q{std::move(q)};
    });
}

void polydina_q_free(polydina_q* q) { delete q; }

int polydina_q_info(const polydina_q* q, int* K, int* J) {
    return wrap([&] {
        require(q != nullptr, "q must not be NULL");
        if (K) *K = q->q.K;
        if (J) *J = q->q.J();
    });
}

int polydina_check(const polydina_q* q, char** json_out, int* verdict) {
    return wrap([&] {
        require(q && json_out, "q and json_out must not be NULL");
        const IdentifiabilityReport report =
            q->q.kind == ModelKind::Gpdina ? check_gpdina(q->q) : seq_verdict(q->q);
        *json_out = dup_string(report_to_json(report));
        if (verdict) {
            switch (report.verdict) {
            case Verdict::Identifiable: *verdict = POLYDINA_VERDICT_IDENTIFIABLE; break;
            case Verdict::NotIdentifiable: *verdict = POLYDINA_VERDICT_NOT_IDENTIFIABLE; break;
            case Verdict::Undetermined: *verdict = POLYDINA_VERDICT_UNDETERMINED; break;
            }
        }
    });
}

int polydina_tmatrix_csv(const polydina_q* q, const char* params_json, char** csv_out) {
    return wrap([&] {
        require(q && csv_out, "q and csv_out must not be NULL");
        const ParamSet s = parse_params_for(q->q, params_json);
        require(s.model == q->q.kind, "parameter model does not match the Q-matrix model");
        const TMatrix t = s.model == ModelKind::Gpdina ? build_t_matrix(q->q, s.gpdina)
                                                       : build_ts_matrix(q->q, s.seq);
        *csv_out = dup_string(t.to_csv());
    });
}

int polydina_random_params(const polydina_q* q, const char* model, uint64_t seed,
                           char** json_out) {
    return wrap([&] {
        require(q && model && json_out, "q, model and json_out must not be NULL");
        const ParamSet s = random_interior_params(q->q, model_kind_from_string(model), seed);
        *json_out = dup_string(param_set_to_json(s));
    });
}

int polydina_convert(const polydina_q* q, const char* params_json, char** json_out) {
    return wrap([&] {
        require(q && json_out, "q and json_out must not be NULL");
        const ParamSet s = parse_params_for(q->q, params_json);
        ParamSet out;
        out.p = s.p;
        if (s.model == ModelKind::Seq) {
            out.model = ModelKind::Gpdina;
            out.gpdina = seq_to_gpdina(s.seq, q->q);
        } else {
            out.model = ModelKind::Seq;
            out.seq = gpdina_to_seq(s.gpdina, q->q);
        }
        *json_out = dup_string(param_set_to_json(out));
    });
}

int polydina_simulate_csv(const polydina_q* q, const char* params_json, size_t n,
                          uint64_t seed, char** csv_out) {
    return wrap([&] {
        require(q && csv_out, "q and csv_out must not be NULL");
        const ParamSet s = parse_params_for(q->q, params_json);
        require(s.model == q->q.kind, "parameter model does not match the Q-matrix model");
        const auto data = s.model == ModelKind::Gpdina
                              ? gpdina_sample(q->q, s.gpdina, s.p, n, seed)
                              : seq_sample(q->q, s.seq, s.p, n, seed);
        *csv_out = dup_string(response_table_to_csv(data));
    });
}

int polydina_fit(const polydina_q* q, const char* data_csv, const char* init_json,
                 uint64_t seed, int max_iter, double tol, char** json_out) {
    return wrap([&] {
        require(q && data_csv && json_out, "q, data_csv and json_out must not be NULL");
        const auto data = parse_response_csv(data_csv, q->q);
        ParamSet init = init_json ? param_set_from_json(init_json)
                                  : random_interior_params(q->q, q->q.kind, seed);
        require(init.model == q->q.kind, "init parameter model does not match the Q-matrix model");
        EmOptions options;
        if (max_iter > 0) options.max_iter = max_iter;
        if (tol > 0) options.tol = tol;
        const FitResult fit = em_fit(q->q, data, init, options);
        *json_out = dup_string(fit_to_json(fit));
    });
}

int polydina_probe(const polydina_q* q, const char* data_csv, int n_starts, uint64_t seed,
                   int max_iter, double tol, char** json_out) {
    return wrap([&] {
        require(q && data_csv && json_out, "q, data_csv and json_out must not be NULL");
        const auto data = parse_response_csv(data_csv, q->q);
        EmOptions options;
        if (max_iter > 0) options.max_iter = max_iter;
        if (tol > 0) options.tol = tol;
        const ProbeResult probe =
            nonidentifiability_probe(q->q, q->q.kind, data, n_starts, seed, options);
        *json_out = dup_string(probe_to_json(probe));
    });
}

int polydina_loglik(const polydina_q* q, const char* params_json, const char* data_csv,
                    char** json_out) {
    return wrap([&] {
        require(q && data_csv && json_out, "q, data_csv and json_out must not be NULL");
        const ParamSet s = parse_params_for(q->q, params_json);
        const auto data = parse_response_csv(data_csv, q->q);
        const LogLikResult result = log_likelihood(q->q, s, data);
        nlohmann::json j;
        if (std::isfinite(result.value))
            j["loglik"] = result.value;
        else
            j["loglik"] = "-inf";
        j["offending_row"] = result.offending_row;
        *json_out = dup_string(j.dump(2));
    });
}

int polydina_counterexample(const polydina_q* q, const char* kind, double eps,
                            const char* base_json, uint64_t seed, char** json_out) {
    return wrap([&] {
        require(q && kind && json_out, "q, kind and json_out must not be NULL");
        const ConstructionKind ck = construction_kind_from_string(kind);
        ParamSet base = base_json ? param_set_from_json(base_json)
                                  : default_params_for(q->q, ck, seed);
        const CounterexamplePair pair = construct_counterexample(q->q, ck, base, eps);
        const VerifyReport verify = verify_counterexample(pair, q->q);
        *json_out = dup_string(pair_to_json(pair, verify));
    });
}

int polydina_rank(const polydina_q* q, const char* params_json, uint64_t seed,
                  char** json_out) {
    return wrap([&] {
        require(q && json_out, "q and json_out must not be NULL");
        const ParamSet s = params_json ? param_set_from_json(params_json)
                                       : random_interior_params(q->q, q->q.kind, seed);
        const RankReport report = jacobian_rank(q->q, s);
        *json_out = dup_string(rank_report_to_json(report));
    });
}

int polydina_dataset(const char* name, char** csv_out) {
    return wrap([&] {
        require(name && csv_out, "name and csv_out must not be NULL");
        const std::string key = name;
        if (key == "pisa2000")
            *csv_out = dup_string(pisa2000_q_csv());
        else if (key == "timss2007")
            *csv_out = dup_string(timss2007_q_csv());
        else
            fail(Errc::invalid_argument,
                 "unknown dataset '" + key + "' (expected pisa2000 or timss2007)");
    });
}

} // extern "C"
