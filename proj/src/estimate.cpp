#include "polydina/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "polydina/identnum.hpp"

namespace polydina {

namespace {

struct UniquePattern {
    std::vector<int> r;
    double count = 0.0;
    std::ptrdiff_t first_row = 0;
};

void validate_rows(const QMatrix& q, const std::vector<std::vector<int>>& data) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& row = data[i];
        if (row.size() != static_cast<std::size_t>(q.J()))
            fail(Errc::invalid_argument, "data row " + std::to_string(i) + " has " +
                                             std::to_string(row.size()) + " entries, expected " +
                                             std::to_string(q.J()));
        for (int j = 0; j < q.J(); ++j)
            if (row[static_cast<std::size_t>(j)] < 0 ||
                row[static_cast<std::size_t>(j)] > q.ncat(j))
                fail(Errc::invalid_argument,
                     "data row " + std::to_string(i) + ", item " + std::to_string(j + 1) +
                         ": response " + std::to_string(row[static_cast<std::size_t>(j)]) +
                         " outside 0.." + std::to_string(q.ncat(j)));
    }
}

std::vector<UniquePattern> aggregate(const QMatrix& q,
                                     const std::vector<std::vector<int>>& data) {
    validate_rows(q, data);
    std::map<std::vector<int>, UniquePattern> acc;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto it = acc.find(data[i]);
        if (it == acc.end())
            acc.emplace(data[i],
                        UniquePattern{data[i], 1.0, static_cast<std::ptrdiff_t>(i)});
        else
            it->second.count += 1.0;
    }
    std::vector<UniquePattern> out;
    out.reserve(acc.size());
    for (auto& [key, up] : acc) out.push_back(std::move(up));
    return out;
}

std::vector<std::vector<double>> tables_for(const QMatrix& q, const ParamSet& s) {
    return s.model == ModelKind::Gpdina ? gpdina_item_tables(q, s.gpdina)
                                        : seq_item_tables(q, s.seq);
}

double pattern_prob(const std::vector<std::vector<double>>& tables, const ParamSet& s,
                    std::size_t nprof, const std::vector<int>& r, std::vector<double>& joint) {
    joint.assign(nprof, 0.0);
    double total = 0.0;
    for (std::size_t a = 0; a < nprof; ++a) {
        double prod = s.p[a];
        for (std::size_t j = 0; j < tables.size(); ++j)
            prod *= tables[j][static_cast<std::size_t>(r[j]) * nprof + a];
        joint[a] = prod;
        total += prod;
    }
    return total;
}

} // namespace

LogLikResult log_likelihood(const QMatrix& q, const ParamSet& params,
                            const std::vector<std::vector<int>>& data) {
    q.validate();
    validate_param_set(params, q);
    const auto patterns = aggregate(q, data);
    const auto tables = tables_for(q, params);
    const std::size_t nprof = num_profiles(q.K);

    LogLikResult result;
    std::vector<double> joint;
    std::ptrdiff_t bad_row = -1;
    for (const auto& up : patterns) {
        const double prob = pattern_prob(tables, params, nprof, up.r, joint);
        if (!(prob > 0.0)) {
            if (bad_row < 0 || up.first_row < bad_row) bad_row = up.first_row;
            continue;
        }
        result.value += up.count * std::log(prob);
    }
    if (bad_row >= 0) {
        result.value = -std::numeric_limits<double>::infinity();
        result.offending_row = bad_row;
    }
    return result;
}

FitResult em_fit(const QMatrix& q, const std::vector<std::vector<int>>& data,
                 const ParamSet& init, const EmOptions& options) {
    q.validate();
    validate_param_set(init, q);
    if (data.empty()) fail(Errc::invalid_argument, "em_fit needs at least one data row");
    if (options.max_iter < 1) fail(Errc::invalid_argument, "max_iter must be >= 1");
    const auto patterns = aggregate(q, data);
    const std::size_t nprof = num_profiles(q.K);
    const double n = static_cast<double>(data.size());
    const int J = q.J();

    // per-category ideal-response sets; for the item-level model every
    // category of an item shares its first row's mask
    std::vector<std::vector<std::vector<char>>> xi(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) {
        xi[static_cast<std::size_t>(j)].resize(static_cast<std::size_t>(q.ncat(j)));
        for (int l = 1; l <= q.ncat(j); ++l) {
            auto& row = xi[static_cast<std::size_t>(j)][static_cast<std::size_t>(l) - 1];
            row.resize(nprof);
            for (std::size_t a = 0; a < nprof; ++a)
                row[a] = mask_dominates(static_cast<Profile>(a), q.row_mask(j, l)) ? 1 : 0;
        }
    }

    FitResult fit;
    fit.params = init;
    std::set<std::tuple<int, int, std::string>> frozen_seen;
    auto record_frozen = [&](int j, int l, const char* branch) {
        if (frozen_seen.emplace(j + 1, l, branch).second)
            fit.frozen.push_back(FrozenCell{j + 1, l, branch});
    };
    const double lo = options.clamp, hi = 1.0 - options.clamp;
    auto clamp = [&](double v) { return std::min(hi, std::max(lo, v)); };

    std::vector<std::vector<double>> w(patterns.size());
    std::vector<double> joint;
    double prev_ll = 0.0;

    for (int iter = 0; iter < options.max_iter; ++iter) {
        // ---- E-step
        const auto tables = tables_for(q, fit.params);
        double ll = 0.0;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            const double prob = pattern_prob(tables, fit.params, nprof, patterns[i].r, joint);
            if (!(prob > 0.0))
                fail(Errc::numeric, "EM hit a zero-probability response pattern (first at data "
                                    "row " +
                                        std::to_string(patterns[i].first_row) + ")");
            ll += patterns[i].count * std::log(prob);
            auto& wi = w[i];
            wi.assign(nprof, 0.0);
            for (std::size_t a = 0; a < nprof; ++a) wi[a] = joint[a] / prob;
        }
        fit.loglik_trace.push_back(ll);
        if (iter > 0 && std::abs(ll - prev_ll) < options.tol) {
            fit.converged = true;
            break;
        }
        prev_ll = ll;

        // ---- M-step
        if (fit.params.model == ModelKind::Gpdina) {
            for (int j = 0; j < J; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                const int H = q.ncat(j);
                const auto& xij = xi[sj][0];
                double denP = 0.0, denM = 0.0;
                std::vector<double> numP(static_cast<std::size_t>(H), 0.0);
                std::vector<double> numM(static_cast<std::size_t>(H), 0.0);
                for (std::size_t i = 0; i < patterns.size(); ++i) {
                    double wp = 0.0, wm = 0.0;
                    for (std::size_t a = 0; a < nprof; ++a)
                        (xij[a] ? wp : wm) += w[i][a];
                    denP += patterns[i].count * wp;
                    denM += patterns[i].count * wm;
                    const int rj = patterns[i].r[sj];
                    if (rj >= 1) {
                        numP[static_cast<std::size_t>(rj) - 1] += patterns[i].count * wp;
                        numM[static_cast<std::size_t>(rj) - 1] += patterns[i].count * wm;
                    }
                }
                auto& tp = fit.params.gpdina.theta_plus[sj];
                auto& tm = fit.params.gpdina.theta_minus[sj];
                for (int l = 1; l <= H; ++l) {
                    const auto sl = static_cast<std::size_t>(l) - 1;
                    if (denP > 0.0)
                        tp[sl] = clamp(numP[sl] / denP);
                    else
                        record_frozen(j, l, "plus");
                    if (denM > 0.0)
                        tm[sl] = clamp(numM[sl] / denM);
                    else
                        record_frozen(j, l, "minus");
                }
                // clamping can nudge a category sum past 1; rescale to keep
                // the parameter set inside the model region
                for (auto* branch : {&tp, &tm}) {
                    double sum = 0.0;
                    for (const double v : *branch) sum += v;
                    if (sum > 1.0) {
                        const double scale = (1.0 - 1e-12) / sum;
                        for (auto& v : *branch) v *= scale;
                    }
                }
                for (int l = 0; l < H; ++l) {
                    const auto sl = static_cast<std::size_t>(l);
                    if (tp[sl] < tm[sl]) std::swap(tp[sl], tm[sl]);
                }
            }
        } else {
            for (int j = 0; j < J; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                const int H = q.ncat(j);
                auto& bp = fit.params.seq.beta_plus[sj];
                auto& bm = fit.params.seq.beta_minus[sj];
                for (int l = 1; l <= H; ++l) {
                    const auto& xil = xi[sj][static_cast<std::size_t>(l) - 1];
                    double numP = 0.0, denP = 0.0, numM = 0.0, denM = 0.0;
                    for (std::size_t i = 0; i < patterns.size(); ++i) {
                        const int rj = patterns[i].r[sj];
                        if (rj < l - 1) continue;
                        double wp = 0.0, wm = 0.0;
                        for (std::size_t a = 0; a < nprof; ++a)
                            (xil[a] ? wp : wm) += w[i][a];
                        wp *= patterns[i].count;
                        wm *= patterns[i].count;
                        denP += wp;
                        denM += wm;
                        if (rj >= l) {
                            numP += wp;
                            numM += wm;
                        }
                    }
                    const auto sl = static_cast<std::size_t>(l) - 1;
                    if (denP > 0.0)
                        bp[sl] = clamp(numP / denP);
                    else
                        record_frozen(j, l, "plus");
                    if (denM > 0.0)
                        bm[sl] = clamp(numM / denM);
                    else
                        record_frozen(j, l, "minus");
                    if (bp[sl] < bm[sl]) std::swap(bp[sl], bm[sl]);
                }
            }
        }
        // ---- proportions
        std::vector<double> pnew(nprof, 0.0);
        for (std::size_t i = 0; i < patterns.size(); ++i)
            for (std::size_t a = 0; a < nprof; ++a)
                pnew[a] += patterns[i].count * w[i][a];
        double psum = 0.0;
        for (auto& v : pnew) {
            v = std::max(v / n, options.clamp);
            psum += v;
        }
        for (auto& v : pnew) v /= psum;
        fit.params.p = std::move(pnew);
        fit.iterations = iter + 1;
    }
    return fit;
}

ProbeResult nonidentifiability_probe(const QMatrix& q, ModelKind model,
                                     const std::vector<std::vector<int>>& data, int n_starts,
                                     std::uint64_t seed, const EmOptions& options) {
    if (n_starts < 1) fail(Errc::invalid_argument, "n_starts must be >= 1");
    struct Entry {
        ParamSet params;
        double loglik;
    };
    std::vector<Entry> fits;
    fits.reserve(static_cast<std::size_t>(n_starts));
    for (int s = 0; s < n_starts; ++s) {
        const ParamSet init =
            random_interior_params(q, model, seed + static_cast<std::uint64_t>(s));
        FitResult fit = em_fit(q, data, init, options);
        fits.push_back(Entry{std::move(fit.params), fit.loglik_trace.back()});
    }
    std::stable_sort(fits.begin(), fits.end(),
                     [](const Entry& a, const Entry& b) { return a.loglik > b.loglik; });

    auto linf = [](const ParamSet& x, const ParamSet& y) {
        double d = 0.0;
        auto acc = [&](const std::vector<std::vector<double>>& a,
                       const std::vector<std::vector<double>>& b) {
            for (std::size_t j = 0; j < a.size(); ++j)
                for (std::size_t l = 0; l < a[j].size(); ++l)
                    d = std::max(d, std::abs(a[j][l] - b[j][l]));
        };
        if (x.model == ModelKind::Gpdina) {
            acc(x.gpdina.theta_plus, y.gpdina.theta_plus);
            acc(x.gpdina.theta_minus, y.gpdina.theta_minus);
        } else {
            acc(x.seq.beta_plus, y.seq.beta_plus);
            acc(x.seq.beta_minus, y.seq.beta_minus);
        }
        for (std::size_t i = 0; i < x.p.size(); ++i) d = std::max(d, std::abs(x.p[i] - y.p[i]));
        return d;
    };

    ProbeResult result;
    for (auto& entry : fits) {
        bool joined = false;
        for (auto& cluster : result.clusters)
            if (linf(cluster.representative, entry.params) <= kProbeParamTol) {
                ++cluster.members;
                joined = true;
                break;
            }
        if (!joined)
            result.clusters.push_back(ProbeCluster{std::move(entry.params), entry.loglik, 1});
    }
    result.best_loglik = result.clusters.front().loglik;
    const double tol = kProbeLoglikTolPerRow * static_cast<double>(data.size());
    for (const auto& cluster : result.clusters)
        if (cluster.loglik >= result.best_loglik - tol) ++result.top_cluster_count;
    return result;
}

std::string fit_to_json(const FitResult& fit) {
    nlohmann::json j;
    j["params"] = nlohmann::json::parse(param_set_to_json(fit.params));
    j["loglik"] = fit.loglik_trace.empty() ? 0.0 : fit.loglik_trace.back();
    j["loglik_trace"] = fit.loglik_trace;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    nlohmann::json frozen = nlohmann::json::array();
    for (const auto& cell : fit.frozen)
        frozen.push_back(
            {{"item", cell.item}, {"category", cell.category}, {"branch", cell.branch}});
    j["frozen"] = std::move(frozen);
    return j.dump(2);
}

std::string probe_to_json(const ProbeResult& probe) {
    nlohmann::json j;
    j["best_loglik"] = probe.best_loglik;
    j["top_cluster_count"] = probe.top_cluster_count;
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& cluster : probe.clusters)
        clusters.push_back(
            {{"loglik", cluster.loglik},
             {"members", cluster.members},
             {"params", nlohmann::json::parse(param_set_to_json(cluster.representative))}});
    j["clusters"] = std::move(clusters);
    return j.dump(2);
}

} // namespace polydina
