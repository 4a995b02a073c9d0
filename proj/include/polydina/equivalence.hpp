#pragma once

#include "polydina/gpdina.hpp"
#include "polydina/seqdina.hpp"

namespace polydina {

// Parameter bijection between the two models on an unrestricted Q-matrix
// (every item's categories share one q-vector).
//
// Forward map (sequential -> item-level), per item and branch:
//   theta_{j,l} = (1 - beta_{j,l+1}) * prod_{h<=l} beta_{j,h},   beta_{j,H_j+1} = 0.
// Inverse map:
//   beta_{j,l} = sum_{h>=l} theta_{j,h} / sum_{h>=l-1} theta_{j,h},
// where the sums include the implicit theta_{j,0} = 1 - sum_{l>=1} theta_{j,l}.
//
// The maps preserve the response distribution but not the strict DINA
// ordering of the target parameterization: outputs are guaranteed
// bounds-valid only, and the forward-model operations accept that level.

// Errors: restricted q; bounds-invalid input; an active zero-guess cascade
// cut (beta_minus[j][l-1] == 0 with l < H_j), where the sequential
// parameters beyond the cut are not well-defined for blocked profiles.
GpdinaParams seq_to_gpdina(const SeqParams& par, const QMatrix& q);

// Errors: restricted q; bounds-invalid input; zero denominator
// sum_{h>=l-1} theta_{j,h} = 0, reported with the offending (item, category).
SeqParams gpdina_to_seq(const GpdinaParams& par, const QMatrix& q);

} // namespace polydina
