#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polydina/params.hpp"

namespace polydina {

// ---------------------------------------------------------------------------
// counterexample constructions
//
// Each kind replays one constructive non-identifiability proof: it projects
// the supplied base parameters onto the structure the construction needs
// (geometric category ladder, group-proportional p, zero-guess boundary),
// pins one designated parameter at original + eps, and solves the remaining
// square system by damped Newton.
// ---------------------------------------------------------------------------

enum class ConstructionKind {
    C1,            // item-level Q missing a unit row: exact mass swap
    C2,            // attribute required by at most two item rows
    C3,            // two attribute columns indistinguishable after block removal
    S1_zero_guess, // first-category submatrix missing a unit row: boundary swap
    NotId1,        // 4-item category-level pattern, blocked two-category item last
    NotId2,        // 4-item category-level pattern, blocked two-category item third
    S2star,        // attribute in only two category rows from two items
    S3star,        // two attribute columns indistinguishable across all category rows
};

std::string to_string(ConstructionKind kind);
ConstructionKind construction_kind_from_string(const std::string& name);

struct CounterexamplePair {
    ModelKind model = ModelKind::Gpdina;
    ConstructionKind kind = ConstructionKind::C2;
    ParamSet original;    // base parameters after the construction's projections
    ParamSet alternative; // solved distinct parameters with the same distribution
    double eps = 0.0;
    // Auxiliary solution coefficients (rho, u, v, w, kappa, ...), kind-dependent.
    std::vector<std::pair<std::string, double>> aux;
};

struct VerifyReport {
    double param_distance = 0.0; // L-infinity over item parameters and p
    double dist_distance = 0.0;  // sup over all response patterns
    bool pass = false;
};

// Verification thresholds (see VerifyReport / verify_counterexample).
inline constexpr double kPairDistTol = 1e-10;
inline constexpr double kPairParamFloor = 1e-4;

// ---------------------------------------------------------------------------
// numerical rank test
// ---------------------------------------------------------------------------

enum class RankVerdict { LocallyIdentifiable, RankDeficient };

std::string to_string(RankVerdict v);

struct RankReport {
    int rank = 0;
    // #free item parameters + 2^K - 1 (p in a simplex chart dropping the
    // last coordinate).
    int expected_full_rank = 0;
    std::vector<double> singular_values;
    // True when every item parameter and every p entry lies inside
    // (1e-3, 1 - 1e-3) - the envelope in which the finite-difference /
    // threshold combination below is calibrated. Boundary points are
    // accepted (the distribution map is polynomial, so central differences
    // remain exact there); the flag records the envelope status.
    bool interior = true;
    RankVerdict verdict = RankVerdict::RankDeficient;
};

inline constexpr double kRankFdStep = 1e-6;
inline constexpr double kRankSigmaTol = 1e-8;   // relative to sigma_max
inline constexpr double kInteriorMargin = 1e-3; // envelope for `interior`

// ---------------------------------------------------------------------------
// operations
// ---------------------------------------------------------------------------

// Sup-norm distance between the two configurations' full response
// distributions, streamed over the canonical pattern order (no dense matrix
// is materialized). Both sets must use the same model kind.
double distribution_distance(const QMatrix& q, const ParamSet& a, const ParamSet& b);

// Central finite-difference Jacobian of (free item params, p chart) ->
// full distribution, ranked by singular values with threshold
// sigma_max * 1e-8. Errors when the pattern space is smaller than the
// parameter count or the Jacobian would exceed the dense entry cap.
RankReport jacobian_rank(const QMatrix& q, const ParamSet& params,
                         double fd_step = kRankFdStep);

// Builds a counterexample of the given kind; `base` supplies the starting
// parameters and p (see random_interior_params / default_params_for).
// Errors: the Q-matrix does not violate the condition in the form the
// construction assumes; Newton fails to reach residual 1e-12 within 200
// iterations; the solved parameters leave the valid region (the message then
// suggests shrinking eps).
CounterexamplePair construct_counterexample(const QMatrix& q, ConstructionKind kind,
                                            const ParamSet& base, double eps);

// pass iff dist_distance <= 1e-10 and param_distance >= min(eps/2, 1e-4).
VerifyReport verify_counterexample(const CounterexamplePair& pair, const QMatrix& q);

// Deterministic well-separated interior parameters for tests, the CLI and as
// construction bases.
ParamSet random_interior_params(const QMatrix& q, ModelKind model, std::uint64_t seed);

// Kind-appropriate base parameters (random interior of the matching model).
ParamSet default_params_for(const QMatrix& q, ConstructionKind kind, std::uint64_t seed);

// JSON emitters for the CLI.
std::string pair_to_json(const CounterexamplePair& pair, const VerifyReport& verify);
std::string rank_report_to_json(const RankReport& report);

} // namespace polydina
