#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "polydina/core.hpp"

namespace polydina {

// ---------------------------------------------------------------------------
// condition identifiers and results
// ---------------------------------------------------------------------------

enum class ConditionId { C1, C2, C3, S1, S2, S3, S2star, S3star };

std::string to_string(ConditionId id);

struct ConditionResult {
    ConditionId id = ConditionId::C1;
    bool holds = true;
    // Human-readable description of the violation; non-empty iff !holds.
    std::string witness;
    // Machine fields: offending / missing attributes (1-based) and the
    // category rows involved ((item, category), 1-based).
    std::vector<int> attributes;
    std::vector<std::pair<int, int>> rows;
    // False only for S3* when S1 fails (condition stated under S1).
    bool applicable = true;
    std::string note;
};

enum class Verdict { Identifiable, NotIdentifiable, Undetermined };

std::string to_string(Verdict v);

struct IdentifiabilityReport {
    ModelKind model = ModelKind::Gpdina;
    int K = 0;
    int J = 0; // item count after pruning
    std::vector<PrunedEntry> pruned;
    std::vector<ConditionResult> results;
    Verdict verdict = Verdict::Undetermined;
    // For Undetermined: which sufficiency/necessity gap applies.
    std::string gap_note;
};

// ---------------------------------------------------------------------------
// checkers
// ---------------------------------------------------------------------------

// Item-level (GPDINA) checker. Prunes internally and records removals.
//   C1: every single-attribute unit row e_k appears among the item rows.
//   C2: every attribute is required by at least 3 item rows.
//   C3: after removing one identity block (greedy first match per attribute;
//       block-choice independence cross-checked exhaustively when J <= 12),
//       the remaining item rows have pairwise-distinct attribute columns.
// Verdict: Identifiable iff C1 and C2 and C3, otherwise NotIdentifiable.
IdentifiabilityReport check_gpdina(const QMatrix& q);

// First-category submatrix of a category-level Q, one row per item.
std::vector<std::vector<int>> extract_q1(const QMatrix& q);

// Sufficient conditions on the first-category submatrix:
//   S1/S2/S3 are C1/C2/C3 applied to the rows of Q^1.
std::vector<ConditionResult> check_seq_sufficient(const QMatrix& q);

// Necessary conditions:
//   S1 as above; S2*: every attribute is required by >= 3 category rows
//   anywhere in Q, coming from >= 2 distinct items; S3*: with one identity
//   block removed from Q^1, the matrix of all remaining category rows
//   (including higher categories of the block items) has pairwise-distinct
//   columns. S3* is reported not-applicable (vacuously true, with a note)
//   when S1 fails.
std::vector<ConditionResult> check_seq_necessary(const QMatrix& q);

// Three-valued verdict: Identifiable if S1&S2&S3; NotIdentifiable if any of
// S1, S2*, S3* fails; otherwise Undetermined with the gap explained.
IdentifiabilityReport seq_verdict(const QMatrix& q);

// JSON form: {model, K, J, pruned:[{item,category}], conditions:[{id, holds,
// witness, applicable, note, attributes, rows}], verdict, gap_note}.
std::string report_to_json(const IdentifiabilityReport& report);

} // namespace polydina
