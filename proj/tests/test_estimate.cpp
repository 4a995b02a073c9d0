// Tests for the marginal log-likelihood, the EM fitter, and the multi-start
// probe: closed-form likelihood values, an exact-frequency fixed point that
// the M-step must reproduce, monotonicity of the trace, row-permutation
// invariance, frozen-cell bookkeeping, and the JSON emitters.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polydina/core.hpp"
#include "polydina/estimate.hpp"
#include "polydina/gpdina.hpp"
#include "polydina/identnum.hpp"
#include "polydina/params.hpp"
#include "polydina/seqdina.hpp"

namespace {

using namespace polydina;

constexpr double kTightTol = 1e-12;
constexpr double kTraceSlack = 1e-10; // permitted non-monotonicity from rounding

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::ok;
}

QMatrix make_q(ModelKind kind, const std::vector<std::vector<Profile>>& items, int K) {
    QMatrix q;
    q.kind = kind;
    q.K = K;
    q.items = items;
    q.validate();
    return q;
}

// Two binary items, both requiring the single attribute.
QMatrix one_attr_two_items(ModelKind kind) {
    return make_q(kind, {{0b1u}, {0b1u}}, 1);
}

ParamSet gpdina_set(const std::vector<std::vector<double>>& tp,
                    const std::vector<std::vector<double>>& tm, const std::vector<double>& p) {
    ParamSet s;
    s.model = ModelKind::Gpdina;
    s.gpdina.theta_plus = tp;
    s.gpdina.theta_minus = tm;
    s.p = p;
    return s;
}

ParamSet seq_set(const std::vector<std::vector<double>>& bp,
                 const std::vector<std::vector<double>>& bm, const std::vector<double>& p) {
    ParamSet s;
    s.model = ModelKind::Seq;
    s.seq.beta_plus = bp;
    s.seq.beta_minus = bm;
    s.p = p;
    return s;
}

// Frequencies 10:6:6:10 over the four response patterns of two binary items
// match the model probabilities exactly at theta+ = 3/4, theta- = 1/4,
// p = (1/2, 1/2), so that parameter set is a fixed point of EM.
std::vector<std::vector<int>> fixed_point_data(int copies) {
    std::vector<std::vector<int>> data;
    for (int c = 0; c < copies; ++c) {
        for (int i = 0; i < 10; ++i) data.push_back({0, 0});
        for (int i = 0; i < 6; ++i) data.push_back({0, 1});
        for (int i = 0; i < 6; ++i) data.push_back({1, 0});
        for (int i = 0; i < 10; ++i) data.push_back({1, 1});
    }
    return data;
}

ParamSet fixed_point_params() {
    return gpdina_set({{0.75}, {0.75}}, {{0.25}, {0.25}}, {0.5, 0.5});
}

// ---------------------------------------------------------------------------
// log_likelihood
// ---------------------------------------------------------------------------

TEST(LogLikelihood, UniformItemProbabilitiesGiveClosedForm) {
    // With theta+ = theta- = 1/2 every category probability is 1/2 regardless
    // of the profile, so each of the 4 patterns has probability 1/4.
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const ParamSet s = gpdina_set({{0.5}, {0.5}}, {{0.5}, {0.5}}, {0.5, 0.5});
    const std::vector<std::vector<int>> data = {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 1}};
    const LogLikResult ll = log_likelihood(q, s, data);
    EXPECT_NEAR(ll.value, 5.0 * std::log(0.25), kTightTol);
    EXPECT_EQ(ll.offending_row, -1);
}

TEST(LogLikelihood, MatchesFullDistributionLookup) {
    const QMatrix q =
        make_q(ModelKind::Gpdina, {{0b01u, 0b01u}, {0b10u}, {0b11u}}, 2);
    const ParamSet s = random_interior_params(q, ModelKind::Gpdina, 97);
    const auto data = gpdina_sample(q, s.gpdina, s.p, 60, 123);

    std::vector<int> ncat(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) ncat[static_cast<std::size_t>(j)] = q.ncat(j);
    const PatternSpace space(ncat);
    const auto dist = full_distribution(q, s);

    double expected = 0.0;
    for (const auto& row : data) expected += std::log(dist[space.index(row)]);

    const LogLikResult ll = log_likelihood(q, s, data);
    EXPECT_NEAR(ll.value, expected, std::abs(expected) * kTightTol + kTightTol);
    EXPECT_EQ(ll.offending_row, -1);
}

TEST(LogLikelihood, SeqModelMatchesFullDistributionLookup) {
    const QMatrix q = make_q(ModelKind::Seq, {{0b01u, 0b11u}, {0b10u}}, 2);
    const ParamSet s = random_interior_params(q, ModelKind::Seq, 55);
    const auto data = seq_sample(q, s.seq, s.p, 40, 77);

    std::vector<int> ncat(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) ncat[static_cast<std::size_t>(j)] = q.ncat(j);
    const PatternSpace space(ncat);
    const auto dist = full_distribution(q, s);

    double expected = 0.0;
    for (const auto& row : data) expected += std::log(dist[space.index(row)]);
    EXPECT_NEAR(log_likelihood(q, s, data).value, expected,
                std::abs(expected) * kTightTol + kTightTol);
}

TEST(LogLikelihood, ImpossiblePatternReportsFirstOffendingRow) {
    // Item 1 has beta- = 0 (non-masters never pass) and item 2 has
    // beta+ = 1 (masters always pass), so the pattern (1, 0) has probability
    // zero under every profile.
    const QMatrix q = one_attr_two_items(ModelKind::Seq);
    const ParamSet s = seq_set({{0.8}, {1.0}}, {{0.0}, {0.3}}, {0.5, 0.5});
    const std::vector<std::vector<int>> data = {{1, 1}, {1, 0}, {0, 0}, {1, 0}};
    const LogLikResult ll = log_likelihood(q, s, data);
    EXPECT_TRUE(std::isinf(ll.value));
    EXPECT_LT(ll.value, 0.0);
    EXPECT_EQ(ll.offending_row, 1);
}

TEST(LogLikelihood, RejectsMalformedRows) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const ParamSet s = fixed_point_params();
    EXPECT_EQ(code_of([&] { log_likelihood(q, s, {{0, 0, 0}}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { log_likelihood(q, s, {{0, 2}}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { log_likelihood(q, s, {{-1, 0}}); }), Errc::invalid_argument);
}

// ---------------------------------------------------------------------------
// em_fit
// ---------------------------------------------------------------------------

TEST(EmFit, ExactFrequencyDataIsAFixedPoint) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const auto data = fixed_point_data(1); // n = 32
    const ParamSet truth = fixed_point_params();

    const FitResult fit = em_fit(q, data, truth);
    EXPECT_TRUE(fit.converged);
    EXPECT_EQ(fit.iterations, 1);
    ASSERT_EQ(fit.loglik_trace.size(), 2u);
    EXPECT_NEAR(fit.loglik_trace[1], fit.loglik_trace[0], kTraceSlack);

    const double expected_ll = 20.0 * std::log(10.0 / 32.0) + 12.0 * std::log(6.0 / 32.0);
    EXPECT_NEAR(fit.loglik_trace[0], expected_ll, 1e-9);

    for (int j = 0; j < 2; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        EXPECT_NEAR(fit.params.gpdina.theta_plus[sj][0], 0.75, kTightTol);
        EXPECT_NEAR(fit.params.gpdina.theta_minus[sj][0], 0.25, kTightTol);
    }
    EXPECT_NEAR(fit.params.p[0], 0.5, kTightTol);
    EXPECT_NEAR(fit.params.p[1], 0.5, kTightTol);
    EXPECT_TRUE(fit.frozen.empty());
}

TEST(EmFit, FixedPointHoldsForLargerMultiples) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const auto data = fixed_point_data(4); // n = 128
    const FitResult fit = em_fit(q, data, fixed_point_params());
    EXPECT_TRUE(fit.converged);
    EXPECT_EQ(fit.iterations, 1);
    EXPECT_NEAR(fit.params.gpdina.theta_plus[0][0], 0.75, kTightTol);
    EXPECT_NEAR(fit.params.p[0], 0.5, kTightTol);
}

TEST(EmFit, RecoversSimulationTruthFromTruthStart) {
    // Identifiable design: the two unit rows appear three times each
    // alongside three saturated rows.
    const QMatrix q = make_q(ModelKind::Gpdina,
                             {{0b01u}, {0b10u}, {0b11u}, {0b11u}, {0b11u}, {0b01u}, {0b10u}}, 2);
    const ParamSet truth = random_interior_params(q, ModelKind::Gpdina, 404);
    const auto data = gpdina_sample(q, truth.gpdina, truth.p, 6000, 2024);

    const FitResult fit = em_fit(q, data, truth);
    EXPECT_TRUE(fit.converged);

    for (int j = 0; j < q.J(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        EXPECT_NEAR(fit.params.gpdina.theta_plus[sj][0], truth.gpdina.theta_plus[sj][0], 0.07)
            << "item " << j + 1;
        EXPECT_NEAR(fit.params.gpdina.theta_minus[sj][0], truth.gpdina.theta_minus[sj][0], 0.07)
            << "item " << j + 1;
    }
    for (std::size_t a = 0; a < fit.params.p.size(); ++a)
        EXPECT_NEAR(fit.params.p[a], truth.p[a], 0.07) << "profile " << a;

    // the trace may only improve, up to rounding noise
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        EXPECT_GE(fit.loglik_trace[i], fit.loglik_trace[i - 1] - kTraceSlack);
}

TEST(EmFit, SeqFitIsMonotoneAndConverges) {
    const QMatrix q =
        make_q(ModelKind::Seq, {{0b01u, 0b11u}, {0b10u}, {0b11u}, {0b01u}, {0b10u}}, 2);
    const ParamSet truth = random_interior_params(q, ModelKind::Seq, 17);
    const auto data = seq_sample(q, truth.seq, truth.p, 1500, 99);

    const ParamSet init = random_interior_params(q, ModelKind::Seq, 18);
    const FitResult fit = em_fit(q, data, init);
    EXPECT_TRUE(fit.converged);
    for (std::size_t i = 1; i < fit.loglik_trace.size(); ++i)
        EXPECT_GE(fit.loglik_trace[i], fit.loglik_trace[i - 1] - kTraceSlack);
    // fitted likelihood can never fall below the starting point's
    EXPECT_GE(fit.loglik_trace.back(), fit.loglik_trace.front() - kTraceSlack);
    validate_param_set(fit.params, q);
    validate_seq_ordering(fit.params.seq, q);
}

TEST(EmFit, ResultIsInvariantUnderRowPermutation) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const ParamSet truth = fixed_point_params();
    auto data = gpdina_sample(q, truth.gpdina, truth.p, 300, 5);
    const ParamSet init = random_interior_params(q, ModelKind::Gpdina, 6);

    const FitResult a = em_fit(q, data, init);
    std::mt19937 gen(42);
    std::shuffle(data.begin(), data.end(), gen);
    const FitResult b = em_fit(q, data, init);

    ASSERT_EQ(a.loglik_trace.size(), b.loglik_trace.size());
    for (std::size_t i = 0; i < a.loglik_trace.size(); ++i)
        EXPECT_DOUBLE_EQ(a.loglik_trace[i], b.loglik_trace[i]);
    EXPECT_EQ(a.iterations, b.iterations);
    for (int j = 0; j < q.J(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        EXPECT_DOUBLE_EQ(a.params.gpdina.theta_plus[sj][0], b.params.gpdina.theta_plus[sj][0]);
        EXPECT_DOUBLE_EQ(a.params.gpdina.theta_minus[sj][0], b.params.gpdina.theta_minus[sj][0]);
    }
    for (std::size_t x = 0; x < a.params.p.size(); ++x)
        EXPECT_DOUBLE_EQ(a.params.p[x], b.params.p[x]);
}

TEST(EmFit, RecordsFrozenCellWhenPosteriorMassVanishes) {
    // With beta- = 0 and every response positive, the posterior puts zero
    // mass on the non-master profile, so the minus-branch denominator is zero
    // and the cell keeps its starting value.
    const QMatrix q = make_q(ModelKind::Seq, {{0b1u}}, 1);
    const ParamSet init = seq_set({{0.8}}, {{0.0}}, {0.5, 0.5});
    const std::vector<std::vector<int>> data(5, std::vector<int>{1});

    const FitResult fit = em_fit(q, data, init);
    ASSERT_EQ(fit.frozen.size(), 1u);
    EXPECT_EQ(fit.frozen[0], (FrozenCell{1, 1, "minus"}));
    EXPECT_DOUBLE_EQ(fit.params.seq.beta_minus[0][0], 0.0);
    EXPECT_GT(fit.params.seq.beta_plus[0][0], 0.9);
}

TEST(EmFit, ClampKeepsProbabilitiesInsideTheOpenInterval) {
    // All-correct responses push theta+ toward 1; the clamp must stop it at
    // 1 - clamp and keep the proportions strictly positive.
    const QMatrix q = make_q(ModelKind::Gpdina, {{0b1u}}, 1);
    const ParamSet init = gpdina_set({{0.6}}, {{0.4}}, {0.5, 0.5});
    const std::vector<std::vector<int>> data(8, std::vector<int>{1});

    EmOptions options;
    options.clamp = 1e-6;
    const FitResult fit = em_fit(q, data, init, options);
    EXPECT_LE(fit.params.gpdina.theta_plus[0][0], 1.0 - options.clamp + 1e-15);
    for (const double v : fit.params.p) EXPECT_GT(v, 0.0);
    validate_param_set(fit.params, q);
}

TEST(EmFit, ZeroProbabilityPatternFailsWithRowIndex) {
    const QMatrix q = one_attr_two_items(ModelKind::Seq);
    const ParamSet init = seq_set({{0.8}, {1.0}}, {{0.0}, {0.3}}, {0.5, 0.5});
    const std::vector<std::vector<int>> data = {{1, 1}, {1, 0}, {0, 0}};
    try {
        em_fit(q, data, init);
        FAIL() << "expected Errc::numeric";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::numeric);
        EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
    }
}

TEST(EmFit, RejectsBadArguments) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const ParamSet init = fixed_point_params();
    EXPECT_EQ(code_of([&] { em_fit(q, {}, init); }), Errc::invalid_argument);
    EmOptions bad;
    bad.max_iter = 0;
    EXPECT_EQ(code_of([&] { em_fit(q, {{0, 0}}, init, bad); }), Errc::invalid_argument);
    ParamSet wrong = init;
    wrong.p = {1.0}; // needs 2 entries for K = 1
    EXPECT_EQ(code_of([&] { em_fit(q, {{0, 0}}, wrong); }), Errc::invalid_argument);
}

TEST(EmFit, StopsAtMaxIterWithoutConvergence) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const ParamSet truth = fixed_point_params();
    const auto data = gpdina_sample(q, truth.gpdina, truth.p, 200, 31);
    EmOptions options;
    options.max_iter = 2;
    options.tol = 0.0; // absolute-zero gain never happens on this data
    const FitResult fit = em_fit(q, data, random_interior_params(q, ModelKind::Gpdina, 3),
                                 options);
    EXPECT_FALSE(fit.converged);
    EXPECT_EQ(fit.iterations, 2);
    EXPECT_EQ(fit.loglik_trace.size(), 2u);
}

// ---------------------------------------------------------------------------
// nonidentifiability_probe
// ---------------------------------------------------------------------------

TEST(Probe, WellIdentifiedDataCollapsesToOneTopCluster) {
    const QMatrix q = make_q(ModelKind::Gpdina,
                             {{0b01u}, {0b10u}, {0b11u}, {0b11u}, {0b11u}, {0b01u}, {0b10u}}, 2);
    const ParamSet truth = random_interior_params(q, ModelKind::Gpdina, 2026);
    const auto data = gpdina_sample(q, truth.gpdina, truth.p, 1200, 7);

    const ProbeResult probe = nonidentifiability_probe(q, ModelKind::Gpdina, data, 4, 100);
    ASSERT_FALSE(probe.clusters.empty());
    int members = 0;
    for (const auto& c : probe.clusters) {
        members += c.members;
        EXPECT_LE(c.loglik, probe.best_loglik + 1e-9);
    }
    EXPECT_EQ(members, 4);
    EXPECT_GE(probe.top_cluster_count, 1);
    // clusters arrive best-first
    for (std::size_t i = 1; i < probe.clusters.size(); ++i)
        EXPECT_LE(probe.clusters[i].loglik, probe.clusters[i - 1].loglik + 1e-12);
    EXPECT_DOUBLE_EQ(probe.best_loglik, probe.clusters.front().loglik);

    const ProbeResult again = nonidentifiability_probe(q, ModelKind::Gpdina, data, 4, 100);
    EXPECT_DOUBLE_EQ(again.best_loglik, probe.best_loglik);
    EXPECT_EQ(again.clusters.size(), probe.clusters.size());
    EXPECT_EQ(again.top_cluster_count, probe.top_cluster_count);
}

TEST(Probe, RejectsNonPositiveStartCount) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    EXPECT_EQ(code_of([&] {
                  nonidentifiability_probe(q, ModelKind::Gpdina, {{0, 0}}, 0, 1);
              }),
              Errc::invalid_argument);
}

// ---------------------------------------------------------------------------
// JSON emitters
// ---------------------------------------------------------------------------

TEST(EstimateJson, FitReportCarriesTraceAndFrozenCells) {
    const QMatrix q = make_q(ModelKind::Seq, {{0b1u}}, 1);
    const ParamSet init = seq_set({{0.8}}, {{0.0}}, {0.5, 0.5});
    const std::vector<std::vector<int>> data(5, std::vector<int>{1});
    const FitResult fit = em_fit(q, data, init);

    const auto j = nlohmann::json::parse(fit_to_json(fit));
    EXPECT_EQ(j.at("params").at("model").get<std::string>(), "seq");
    EXPECT_TRUE(j.at("params").contains("beta_plus"));
    EXPECT_TRUE(j.at("loglik_trace").is_array());
    EXPECT_EQ(j.at("loglik_trace").size(), fit.loglik_trace.size());
    EXPECT_DOUBLE_EQ(j.at("loglik").get<double>(), fit.loglik_trace.back());
    EXPECT_EQ(j.at("iterations").get<int>(), fit.iterations);
    EXPECT_EQ(j.at("converged").get<bool>(), fit.converged);
    ASSERT_EQ(j.at("frozen").size(), 1u);
    EXPECT_EQ(j.at("frozen")[0].at("item").get<int>(), 1);
    EXPECT_EQ(j.at("frozen")[0].at("category").get<int>(), 1);
    EXPECT_EQ(j.at("frozen")[0].at("branch").get<std::string>(), "minus");
}

TEST(EstimateJson, ProbeReportListsClustersBestFirst) {
    const QMatrix q = one_attr_two_items(ModelKind::Gpdina);
    const ParamSet truth = fixed_point_params();
    const auto data = gpdina_sample(q, truth.gpdina, truth.p, 400, 13);
    const ProbeResult probe = nonidentifiability_probe(q, ModelKind::Gpdina, data, 3, 50);

    const auto j = nlohmann::json::parse(probe_to_json(probe));
    EXPECT_DOUBLE_EQ(j.at("best_loglik").get<double>(), probe.best_loglik);
    EXPECT_EQ(j.at("top_cluster_count").get<int>(), probe.top_cluster_count);
    ASSERT_EQ(j.at("clusters").size(), probe.clusters.size());
    const auto& first = j.at("clusters")[0];
    EXPECT_DOUBLE_EQ(first.at("loglik").get<double>(), probe.best_loglik);
    EXPECT_TRUE(first.at("params").contains("theta_plus"));
    EXPECT_GE(first.at("members").get<int>(), 1);
}

} // namespace
