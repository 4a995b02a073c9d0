#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polydina/core.hpp"

namespace polydina {

// ---------------------------------------------------------------------------
// Sequential DINA parameters
//
// beta_plus[j][l-1] / beta_minus[j][l-1] are the conditional pass
// probabilities of category l of item j (given category l-1 was passed) for
// profiles that do / do not dominate q_{j,l}. The out-of-range categories are
// implicit: S_j(0|a) = 1 and beta_{j,H_j+1} = 0.
//
// Zero-guessing cascade: when beta_minus[j][l*-1] == 0, profiles lacking
// q_{j,l*} can never reach category l*, so their conditional probabilities
// for l > l* are taken as exact 0. The cascade is applied profile-by-profile
// at evaluation time (the rule only zeroes parameters for blocked profiles,
// so item storage stays profile-independent); normalize_cascade validates
// parameters and returns the canonical representation, and is idempotent.
// ---------------------------------------------------------------------------

struct SeqParams {
    std::vector<std::vector<double>> beta_plus;
    std::vector<std::vector<double>> beta_minus;
};

// Bounds validity: shapes match q and every entry lies in [0,1].
void validate_seq_bounds(const SeqParams& par, const QMatrix& q);

// Full validity: bounds plus strict ordering beta_minus < beta_plus per
// category (boundaries beta_minus = 0 and beta_plus = 1 are allowed).
void validate_seq_ordering(const SeqParams& par, const QMatrix& q);

// Canonical representation of the cascade rule (see above). Errors when
// beta_minus > beta_plus anywhere; otherwise returns the input unchanged.
SeqParams normalize_cascade(const SeqParams& par, const QMatrix& q);

// First category l at which profile `a` is blocked on item j: the smallest l
// with beta_minus[j][l-1] == 0 and xi_{j,l,a} == 0. Returns H_j + 1 when the
// profile is never blocked.
int seq_blocked_from(const QMatrix& q, const SeqParams& par, int j, Profile a);

// S_j(l | a) = beta_plus^xi * beta_minus^(1-xi); l = 0 gives 1 and
// l = H_j + 1 gives 0. Categories beyond a cascade block evaluate to 0.
double processing_probability(const QMatrix& q, const SeqParams& par, int j, int l, Profile a);

// P(R_j >= r_j | a) = prod_{l<=r_j} S_j(l | a); r_j = 0 gives 1 and
// r_j = H_j + 1 gives 0.
double cumulative_prob(const QMatrix& q, const SeqParams& par, int j, int rj, Profile a);

// P(R_j = r_j | a) = (1 - S_j(r_j+1 | a)) * prod_{l<=r_j} S_j(l | a).
double seq_item_pmf(const QMatrix& q, const SeqParams& par, int j, int rj, Profile a);

// P(R = r) and the full pattern distribution, as in the GPDINA module.
double seq_marginal_prob(const QMatrix& q, const SeqParams& par,
                         std::span<const double> p, std::span<const int> r);
std::vector<double> seq_full_distribution(const QMatrix& q, const SeqParams& par,
                                          std::span<const double> p);

// T^s-matrix: t^s_{r,alpha} = prod_{j: r_j != 0} P(R_j >= r_j | alpha).
TMatrix build_ts_matrix(const QMatrix& q, const SeqParams& par);

// Sequential Bernoulli sampling per category; deterministic given the seed.
std::vector<std::vector<int>> seq_sample(const QMatrix& q, const SeqParams& par,
                                         std::span<const double> p, std::size_t n,
                                         std::uint64_t seed);

// Per-item response tables L[j][r_j * 2^K + a] = P(R_j = r_j | a).
std::vector<std::vector<double>> seq_item_tables(const QMatrix& q, const SeqParams& par);

// Per-item cumulative tables C[j][r_j * 2^K + a] = P(R_j >= r_j | a).
std::vector<std::vector<double>> seq_cumulative_tables(const QMatrix& q, const SeqParams& par);

} // namespace polydina
