#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polydina/params.hpp"

namespace polydina {

// ---------------------------------------------------------------------------
// marginal log-likelihood
// ---------------------------------------------------------------------------

struct LogLikResult {
    double value = 0.0;
    // 0-based index of the first data row whose pattern probability is not
    // strictly positive (value is then -infinity); -1 when none.
    std::ptrdiff_t offending_row = -1;
};

LogLikResult log_likelihood(const QMatrix& q, const ParamSet& params,
                            const std::vector<std::vector<int>>& data);

// ---------------------------------------------------------------------------
// EM estimation
// ---------------------------------------------------------------------------

struct EmOptions {
    int max_iter = 500;
    double tol = 1e-8;     // absolute log-likelihood gain threshold
    double clamp = 1e-10;  // probabilities kept inside [clamp, 1 - clamp]
};

// A parameter cell whose M-step denominator vanished; its previous value was
// kept for that iteration.
struct FrozenCell {
    int item = 0;     // 1-based
    int category = 0; // 1-based
    std::string branch; // "plus" | "minus"
    bool operator==(const FrozenCell&) const = default;
};

struct FitResult {
    ParamSet params;
    std::vector<double> loglik_trace; // one entry per E-step
    int iterations = 0;               // completed EM iterations
    bool converged = false;
    std::vector<FrozenCell> frozen;   // recorded once per cell
};

// Expectation-maximization from the given starting point. Respondents are
// aggregated by unique response pattern, so the result is invariant under
// row permutations of `data`. Per-category probabilities are clamped to
// [clamp, 1 - clamp]; the sequential variant therefore explores the interior
// of the parameter region only (zero-guess boundaries are never produced,
// and the cascade rule stays inactive during fitting).
FitResult em_fit(const QMatrix& q, const std::vector<std::vector<int>>& data,
                 const ParamSet& init, const EmOptions& options = {});

// ---------------------------------------------------------------------------
// multi-start probe
// ---------------------------------------------------------------------------

struct ProbeCluster {
    ParamSet representative; // highest-likelihood member
    double loglik = 0.0;
    int members = 0;
};

struct ProbeResult {
    // Sorted by log-likelihood, best first.
    std::vector<ProbeCluster> clusters;
    double best_loglik = 0.0;
    // Number of clusters whose log-likelihood is within 1e-4 * n of the best:
    // > 1 flags a flat ridge, the estimation-side symptom of a
    // non-identifiable configuration.
    int top_cluster_count = 0;
};

inline constexpr double kProbeLoglikTolPerRow = 1e-4;
inline constexpr double kProbeParamTol = 1e-2; // L-infinity cluster radius

// Runs em_fit from n_starts random interior starting points (seeds
// seed, seed+1, ...) and clusters the fitted parameter sets.
ProbeResult nonidentifiability_probe(const QMatrix& q, ModelKind model,
                                     const std::vector<std::vector<int>>& data, int n_starts,
                                     std::uint64_t seed, const EmOptions& options = {});

// JSON emitters for the CLI.
std::string fit_to_json(const FitResult& fit);
std::string probe_to_json(const ProbeResult& probe);

} // namespace polydina
