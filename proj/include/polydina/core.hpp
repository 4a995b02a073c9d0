#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "polydina/error.hpp"

namespace polydina {

// ---------------------------------------------------------------------------
// model kinds
// ---------------------------------------------------------------------------

enum class ModelKind { Gpdina, Seq };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name); // "gpdina" | "seq"

inline constexpr int kMaxAttributes = 20;

// ---------------------------------------------------------------------------
// attribute profiles
//
// A profile alpha = (alpha_1 .. alpha_K) is stored as the bits of an unsigned
// index with alpha_1 in the least significant position, so the canonical
// profile index is sum_k alpha_k * 2^(k-1). For K=2 the order is
// (0,0), (1,0), (0,1), (1,1).
// ---------------------------------------------------------------------------

using Profile = std::uint32_t;

inline int profile_bit(Profile a, int k0) { return static_cast<int>((a >> k0) & 1u); }

inline std::size_t num_profiles(int K) { return std::size_t{1} << K; }

// All 2^K profiles as explicit bit vectors, in canonical index order.
std::vector<std::vector<int>> enumerate_profiles(int K);

// Canonical index of an explicit profile; inverse of enumerate_profiles.
std::size_t profile_index(std::span<const int> bits);

// Partial order: a dominates the requirement mask q iff every required
// attribute is mastered.
inline bool mask_dominates(Profile a, std::uint32_t q_mask) {
    return (a & q_mask) == q_mask;
}

// Ideal response xi(q, a) = 1 iff a_k >= q_k for all k. Throws on length
// mismatch or non-binary entries.
int ideal_response(std::span<const int> q_row, std::span<const int> a);

// ---------------------------------------------------------------------------
// Q-matrices
//
// Both model variants share one container: items[j][l-1] is the attribute
// requirement mask of category l of item j. The GPDINA (item-level) variant
// additionally requires all categories of an item to share one mask.
// ---------------------------------------------------------------------------

struct QMatrix {
    ModelKind kind = ModelKind::Seq;
    int K = 0;
    std::vector<std::vector<std::uint32_t>> items;

    int J() const { return static_cast<int>(items.size()); }
    int ncat(int j) const { return static_cast<int>(items[j].size()); } // H_j
    std::uint32_t row_mask(int j, int l) const { return items[j][static_cast<std::size_t>(l) - 1]; }
    std::vector<int> row_bits(int j, int l) const;

    // True iff every item's categories share one q-vector.
    bool is_unrestricted() const;

    // Structural validation: K in [1, kMaxAttributes], at least one item,
    // every item with >= 1 category, masks within K bits, and the shared-row
    // invariant for the GPDINA kind.
    void validate() const;
};

// Parses Q-matrix CSV text. Two layouts are accepted:
//   prefixed:  "item,category,q1..qK"  (Seq)  /  "item,ncat,q1..qK" (Gpdina)
//   bare:      one row of K binary cells per single-category item
// Lines starting with '#' and blank lines are skipped. When a file is valid
// in both layouts the prefixed reading wins. A Gpdina file may also use the
// one-row-per-category layout provided all categories of an item agree.
QMatrix parse_q_matrix(const std::string& csv_text, ModelKind kind);

// Serialization in the prefixed layout (used by the datasets writer).
std::string q_matrix_to_csv(const QMatrix& q);

struct PrunedEntry {
    int item = 0;     // 1-based original item number
    int category = 0; // 1-based original category number
    bool operator==(const PrunedEntry&) const = default;
};

struct PruneResult {
    QMatrix q;
    std::vector<PrunedEntry> removed;
    // new item position (0-based) -> original 1-based item number; items that
    // lost every category are absent.
    std::vector<int> kept_items;
};

// Removes categories whose q-vector is all-zero; surviving categories are
// renumbered consecutively and items that lose all categories are dropped
// (all their categories appear in `removed`).
PruneResult prune_zero_categories(const QMatrix& q);

// ---------------------------------------------------------------------------
// proportion vectors
// ---------------------------------------------------------------------------

inline constexpr double kProportionSumTol = 1e-12;

// All entries strictly positive, length 2^K, sum within kProportionSumTol of 1.
void validate_proportions(std::span<const double> p, int K);

// ---------------------------------------------------------------------------
// response patterns
//
// A response pattern r = (r_1 .. r_J) with r_j in {0..H_j} has canonical row
// index given by the mixed-radix value with r_J varying fastest.
// ---------------------------------------------------------------------------

class PatternSpace {
public:
    explicit PatternSpace(std::vector<int> ncat);
    static PatternSpace of(const QMatrix& q);

    int J() const { return static_cast<int>(ncat_.size()); }
    int ncat(int j) const { return ncat_[static_cast<std::size_t>(j)]; }
    std::size_t size() const { return size_; }

    std::size_t index(std::span<const int> r) const;
    std::vector<int> pattern(std::size_t idx) const;

    // Odometer step in canonical order (r_J fastest); returns false after the
    // last pattern. Start from the all-zero pattern.
    bool next(std::vector<int>& r) const;

private:
    std::vector<int> ncat_;
    std::vector<std::size_t> stride_;
    std::size_t size_ = 1;
};

// ---------------------------------------------------------------------------
// dense marginal-probability matrices (T / T^s)
// ---------------------------------------------------------------------------

// Entry cap for dense pattern-by-profile matrices; overridable through the
// POLYDINA_MATRIX_CAP environment variable (number of entries).
inline constexpr std::size_t kDefaultMatrixEntryCap = std::size_t{1} << 26;
std::size_t matrix_entry_cap();

struct TMatrix {
    PatternSpace patterns;
    int K = 0;
    std::vector<double> data; // row-major, patterns.size() x 2^K

    std::size_t rows() const { return patterns.size(); }
    std::size_t cols() const { return num_profiles(K); }
    double at(std::size_t r, std::size_t a) const { return data[r * cols() + a]; }
    double& at(std::size_t r, std::size_t a) { return data[r * cols() + a]; }

    // CSV with a "pattern" key column ("r1-r2-...-rJ") and one column per
    // profile (header "a<bits>").
    std::string to_csv() const;
};

// ---------------------------------------------------------------------------
// response data tables
// ---------------------------------------------------------------------------

// One respondent per row, J integer category columns; '#' comments allowed.
std::vector<std::vector<int>> parse_response_csv(const std::string& csv_text,
                                                 const QMatrix& q);
std::string response_table_to_csv(const std::vector<std::vector<int>>& data);

} // namespace polydina
