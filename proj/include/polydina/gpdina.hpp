#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydina/core.hpp"

namespace polydina {

// ---------------------------------------------------------------------------
// GPDINA parameters
//
// theta_plus[j][l-1] / theta_minus[j][l-1] are the category-l success
// probabilities for profiles that do / do not dominate item j's q-vector.
// Category 0 is implicit: theta_{j,0} = 1 - sum_l theta_{j,l}.
// ---------------------------------------------------------------------------

struct GpdinaParams {
    std::vector<std::vector<double>> theta_plus;
    std::vector<std::vector<double>> theta_minus;
};

// Bounds validity: shapes match q, every entry in [0,1], per-item sums <= 1.
// This is the level required by the forward-model operations (distribution
// evaluation must accept parameters produced by the model-equivalence map,
// which can legally break the strict ordering).
void validate_gpdina_bounds(const GpdinaParams& par, const QMatrix& q);

// Full validity: bounds plus the strict DINA ordering
// 0 <= theta_minus < theta_plus <= 1 per category.
void validate_gpdina_ordering(const GpdinaParams& par, const QMatrix& q);

// P(R_j = l | alpha): theta_plus branch when alpha dominates q_j, else
// theta_minus; l = 0 returns the complement 1 - sum_l theta.
double gpdina_category_pmf(const QMatrix& q, const GpdinaParams& par, int j, int l, Profile a);

// P(R = r) = sum_alpha p_alpha * prod_j P(R_j = r_j | alpha).
double gpdina_marginal_prob(const QMatrix& q, const GpdinaParams& par,
                            std::span<const double> p, std::span<const int> r);

// All pattern probabilities in canonical pattern order; sums to 1.
std::vector<double> gpdina_full_distribution(const QMatrix& q, const GpdinaParams& par,
                                             std::span<const double> p);

// T-matrix: t_{r,alpha} = prod_{j: r_j != 0} P(R_j = r_j | alpha). The row of
// the all-zero pattern is all ones. Errors when patterns * profiles exceeds
// the configured entry cap.
TMatrix build_t_matrix(const QMatrix& q, const GpdinaParams& par);

// i.i.d. respondent draws: profile ~ p, then per-item categorical draws.
// Deterministic given the seed.
std::vector<std::vector<int>> gpdina_sample(const QMatrix& q, const GpdinaParams& par,
                                            std::span<const double> p, std::size_t n,
                                            std::uint64_t seed);

// Per-item response tables L[j][r_j * 2^K + a] = P(R_j = r_j | a); shared by
// the distribution, likelihood and distance code paths.
std::vector<std::vector<double>> gpdina_item_tables(const QMatrix& q, const GpdinaParams& par);

} // namespace polydina
