#include "polydina/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>

namespace polydina {

// ---------------------------------------------------------------------------
// model kinds
// ---------------------------------------------------------------------------

std::string to_string(ModelKind kind) {
    return kind == ModelKind::Gpdina ? "gpdina" : "seq";
}

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "gpdina") return ModelKind::Gpdina;
    if (name == "seq") return ModelKind::Seq;
    fail(Errc::invalid_argument, "unknown model kind '" + name + "' (expected gpdina|seq)");
}

// ---------------------------------------------------------------------------
// profiles
// ---------------------------------------------------------------------------

std::vector<std::vector<int>> enumerate_profiles(int K) {
    if (K < 1 || K > kMaxAttributes)
        fail(Errc::invalid_argument,
             "attribute count K=" + std::to_string(K) + " out of range [1, " +
                 std::to_string(kMaxAttributes) + "]");
    std::vector<std::vector<int>> out;
    out.reserve(num_profiles(K));
    for (Profile a = 0; a < num_profiles(K); ++a) {
        std::vector<int> bits(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k) bits[static_cast<std::size_t>(k)] = profile_bit(a, k);
        out.push_back(std::move(bits));
    }
    return out;
}

std::size_t profile_index(std::span<const int> bits) {
    if (bits.empty() || bits.size() > static_cast<std::size_t>(kMaxAttributes))
        fail(Errc::invalid_argument, "profile length out of range");
    std::size_t idx = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] != 0 && bits[k] != 1)
            fail(Errc::invalid_argument, "profile entries must be 0 or 1");
        idx |= static_cast<std::size_t>(bits[k]) << k;
    }
    return idx;
}

int ideal_response(std::span<const int> q_row, std::span<const int> a) {
    if (q_row.size() != a.size())
        fail(Errc::invalid_argument, "ideal_response: length mismatch");
    for (std::size_t k = 0; k < q_row.size(); ++k) {
        if ((q_row[k] != 0 && q_row[k] != 1) || (a[k] != 0 && a[k] != 1))
            fail(Errc::invalid_argument, "ideal_response: entries must be 0 or 1");
        if (a[k] < q_row[k]) return 0;
    }
    return 1;
}

// ---------------------------------------------------------------------------
// QMatrix
// ---------------------------------------------------------------------------

std::vector<int> QMatrix::row_bits(int j, int l) const {
    std::vector<int> bits(static_cast<std::size_t>(K));
    const std::uint32_t mask = row_mask(j, l);
    for (int k = 0; k < K; ++k) bits[static_cast<std::size_t>(k)] = profile_bit(mask, k);
    return bits;
}

bool QMatrix::is_unrestricted() const {
    for (const auto& cats : items)
        for (const auto mask : cats)
            if (mask != cats.front()) return false;
    return true;
}

void QMatrix::validate() const {
    if (K < 1 || K > kMaxAttributes)
        fail(Errc::invalid_argument,
             "Q-matrix attribute count K=" + std::to_string(K) + " out of range [1, " +
                 std::to_string(kMaxAttributes) + "]");
    if (items.empty()) fail(Errc::invalid_argument, "Q-matrix has no items");
    const std::uint32_t limit = (K == 32) ? ~0u : ((1u << K) - 1u);
    for (std::size_t j = 0; j < items.size(); ++j) {
        if (items[j].empty())
            fail(Errc::invalid_argument, "item " + std::to_string(j + 1) + " has no categories");
        for (const auto mask : items[j])
            if ((mask & ~limit) != 0)
                fail(Errc::invalid_argument, "q-vector uses attributes beyond K");
        if (kind == ModelKind::Gpdina)
            for (const auto mask : items[j])
                if (mask != items[j].front())
                    fail(Errc::invalid_argument,
                         "item " + std::to_string(j + 1) +
                             ": categories disagree (item-level Q-matrix requires one shared q-vector)");
    }
}

// ---------------------------------------------------------------------------
// CSV parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::vector<std::string>> read_csv_cells(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(t);
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (!t.empty() && t.back() == ',') cells.push_back("");
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::optional<long> parse_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == nullptr || *end != '\0') return std::nullopt;
    return v;
}

std::optional<int> parse_binary(const std::string& s) {
    if (s == "0") return 0;
    if (s == "1") return 1;
    return std::nullopt;
}

// Attempts the "item,<second>,q1..qK" layout. On success fills `q`;
// otherwise returns a reason.
std::optional<std::string> try_parse_prefixed(const std::vector<std::vector<std::string>>& rows,
                                              ModelKind kind, QMatrix& q) {
    const std::size_t ncols = rows.front().size();
    if (ncols < 3) return "needs at least 3 columns (item, category, q1..)";
    const int K = static_cast<int>(ncols) - 2;

    std::vector<std::pair<long, long>> ids;   // (item, second)
    std::vector<std::uint32_t> masks;
    ids.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& cells = rows[i];
        const auto item = parse_int(cells[0]);
        const auto second = parse_int(cells[1]);
        if (!item || *item < 1) return "row " + std::to_string(i + 1) + ": bad item number";
        if (!second || *second < 1)
            return "row " + std::to_string(i + 1) + ": bad category/ncat value";
        std::uint32_t mask = 0;
        for (int k = 0; k < K; ++k) {
            const auto bit = parse_binary(cells[static_cast<std::size_t>(k) + 2]);
            if (!bit)
                return "row " + std::to_string(i + 1) + ": non-binary cell '" +
                       cells[static_cast<std::size_t>(k) + 2] + "'";
            mask |= static_cast<std::uint32_t>(*bit) << k;
        }
        ids.emplace_back(*item, *second);
        masks.push_back(mask);
    }

    const bool items_unique = [&] {
        for (std::size_t i = 1; i < ids.size(); ++i)
            for (std::size_t h = 0; h < i; ++h)
                if (ids[i].first == ids[h].first) return false;
        return true;
    }();

    q = QMatrix{};
    q.kind = kind;
    q.K = K;

    if (kind == ModelKind::Gpdina && items_unique) {
        // documented layout: one row per item, second column = category count
        long expect = 1;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i].first != expect)
                return "row " + std::to_string(i + 1) + ": item numbers must run 1..J in order";
            ++expect;
            const long ncat = ids[i].second;
            if (ncat < 1 || ncat > 64)
                return "row " + std::to_string(i + 1) + ": category count out of range";
            q.items.emplace_back(static_cast<std::size_t>(ncat), masks[i]);
        }
        return std::nullopt;
    }

    // one row per category, grouped by item, categories consecutive from 1
    long cur_item = 0;
    long cur_cat = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto [item, cat] = ids[i];
        if (item == cur_item + 1 && cat == 1) {
            cur_item = item;
            cur_cat = 1;
            q.items.emplace_back();
        } else if (item == cur_item && cat == cur_cat + 1) {
            cur_cat = cat;
        } else {
            return "row " + std::to_string(i + 1) +
                   ": items must run 1..J with categories consecutive from 1";
        }
        q.items.back().push_back(masks[i]);
    }
    if (kind == ModelKind::Gpdina) {
        for (std::size_t j = 0; j < q.items.size(); ++j)
            for (const auto mask : q.items[j])
                if (mask != q.items[j].front())
                    return "item " + std::to_string(j + 1) +
                           ": categories within an item disagree (item-level Q-matrix "
                           "requires one shared q-vector)";
    }
    return std::nullopt;
}

std::optional<std::string> try_parse_bare(const std::vector<std::vector<std::string>>& rows,
                                          ModelKind kind, QMatrix& q) {
    const int K = static_cast<int>(rows.front().size());
    q = QMatrix{};
    q.kind = kind;
    q.K = K;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::uint32_t mask = 0;
        for (int k = 0; k < K; ++k) {
            const auto bit = parse_binary(rows[i][static_cast<std::size_t>(k)]);
            if (!bit)
                return "row " + std::to_string(i + 1) + ": non-binary cell '" +
                       rows[i][static_cast<std::size_t>(k)] + "'";
            mask |= static_cast<std::uint32_t>(*bit) << k;
        }
        q.items.push_back({mask});
    }
    return std::nullopt;
}

} // namespace

QMatrix parse_q_matrix(const std::string& csv_text, ModelKind kind) {
    const auto rows = read_csv_cells(csv_text);
    if (rows.empty()) fail(Errc::parse, "Q-matrix file contains no data rows");
    const std::size_t ncols = rows.front().size();
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].size() != ncols)
            fail(Errc::parse, "ragged rows: row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " cells, expected " +
                                  std::to_string(ncols));

    QMatrix q;
    const auto prefixed_err = try_parse_prefixed(rows, kind, q);
    if (!prefixed_err) {
        q.validate();
        return q;
    }
    const auto bare_err = try_parse_bare(rows, kind, q);
    if (!bare_err) {
        q.validate();
        return q;
    }
    fail(Errc::parse, "Q-matrix not parseable; as prefixed layout: " + *prefixed_err +
                          "; as bare layout: " + *bare_err);
}

std::string q_matrix_to_csv(const QMatrix& q) {
    std::ostringstream out;
    if (q.kind == ModelKind::Gpdina) {
        out << "# item,ncat";
        for (int k = 1; k <= q.K; ++k) out << ",q" << k;
        out << "\n";
        for (int j = 0; j < q.J(); ++j) {
            out << (j + 1) << ',' << q.ncat(j);
            for (int k = 0; k < q.K; ++k) out << ',' << profile_bit(q.row_mask(j, 1), k);
            out << "\n";
        }
    } else {
        out << "# item,category";
        for (int k = 1; k <= q.K; ++k) out << ",q" << k;
        out << "\n";
        for (int j = 0; j < q.J(); ++j)
            for (int l = 1; l <= q.ncat(j); ++l) {
                out << (j + 1) << ',' << l;
                for (int k = 0; k < q.K; ++k) out << ',' << profile_bit(q.row_mask(j, l), k);
                out << "\n";
            }
    }
    return out.str();
}

PruneResult prune_zero_categories(const QMatrix& q) {
    q.validate();
    PruneResult res;
    res.q.kind = q.kind;
    res.q.K = q.K;
    for (int j = 0; j < q.J(); ++j) {
        std::vector<std::uint32_t> kept;
        for (int l = 1; l <= q.ncat(j); ++l) {
            if (q.row_mask(j, l) == 0)
                res.removed.push_back({j + 1, l});
            else
                kept.push_back(q.row_mask(j, l));
        }
        if (!kept.empty()) {
            res.q.items.push_back(std::move(kept));
            res.kept_items.push_back(j + 1);
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// proportions
// ---------------------------------------------------------------------------

void validate_proportions(std::span<const double> p, int K) {
    if (p.size() != num_profiles(K))
        fail(Errc::invalid_argument, "proportion vector length " + std::to_string(p.size()) +
                                         " != 2^K = " + std::to_string(num_profiles(K)));
    double sum = 0.0;
    for (const double v : p) {
        if (!(v > 0.0))
            fail(Errc::invalid_argument, "proportion entries must be strictly positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProportionSumTol)
        fail(Errc::invalid_argument, "proportions sum to " + std::to_string(sum) +
                                         ", expected 1 within 1e-12");
}

// ---------------------------------------------------------------------------
// pattern space
// ---------------------------------------------------------------------------

PatternSpace::PatternSpace(std::vector<int> ncat) : ncat_(std::move(ncat)) {
    if (ncat_.empty()) fail(Errc::invalid_argument, "pattern space needs at least one item");
    stride_.assign(ncat_.size(), 1);
    for (int j = static_cast<int>(ncat_.size()) - 1; j >= 0; --j) {
        if (ncat_[static_cast<std::size_t>(j)] < 1)
            fail(Errc::invalid_argument, "pattern space: every item needs H_j >= 1");
        if (j + 1 < static_cast<int>(ncat_.size()))
            stride_[static_cast<std::size_t>(j)] =
                stride_[static_cast<std::size_t>(j) + 1] *
                static_cast<std::size_t>(ncat_[static_cast<std::size_t>(j) + 1] + 1);
    }
    size_ = stride_[0] * static_cast<std::size_t>(ncat_[0] + 1);
}

PatternSpace PatternSpace::of(const QMatrix& q) {
    std::vector<int> ncat(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) ncat[static_cast<std::size_t>(j)] = q.ncat(j);
    return PatternSpace(std::move(ncat));
}

std::size_t PatternSpace::index(std::span<const int> r) const {
    if (r.size() != ncat_.size()) fail(Errc::invalid_argument, "pattern length mismatch");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (r[j] < 0 || r[j] > ncat_[j])
            fail(Errc::invalid_argument, "pattern entry out of bounds at item " +
                                             std::to_string(j + 1));
        idx += static_cast<std::size_t>(r[j]) * stride_[j];
    }
    return idx;
}

std::vector<int> PatternSpace::pattern(std::size_t idx) const {
    if (idx >= size_) fail(Errc::invalid_argument, "pattern index out of range");
    std::vector<int> r(ncat_.size());
    for (std::size_t j = 0; j < ncat_.size(); ++j) {
        r[j] = static_cast<int>(idx / stride_[j]);
        idx %= stride_[j];
    }
    return r;
}

bool PatternSpace::next(std::vector<int>& r) const {
    for (int j = static_cast<int>(ncat_.size()) - 1; j >= 0; --j) {
        auto& v = r[static_cast<std::size_t>(j)];
        if (v < ncat_[static_cast<std::size_t>(j)]) {
            ++v;
            return true;
        }
        v = 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// matrix cap and TMatrix
// ---------------------------------------------------------------------------

std::size_t matrix_entry_cap() {
    if (const char* env = std::getenv("POLYDINA_MATRIX_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != nullptr && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultMatrixEntryCap;
}

std::string TMatrix::to_csv() const {
    std::ostringstream out;
    out << "pattern";
    for (Profile a = 0; a < cols(); ++a) {
        out << ",a";
        for (int k = 0; k < K; ++k) out << profile_bit(a, k);
    }
    out << "\n";
    std::vector<int> r(static_cast<std::size_t>(patterns.J()), 0);
    std::size_t row = 0;
    do {
        for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "-" : "") << r[j];
        for (std::size_t a = 0; a < cols(); ++a) {
            out << ',';
            // round-trippable shortest representation
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", at(row, a));
            out << buf;
        }
        out << "\n";
        ++row;
    } while (patterns.next(r));
    return out.str();
}

// ---------------------------------------------------------------------------
// response tables
// ---------------------------------------------------------------------------

std::vector<std::vector<int>> parse_response_csv(const std::string& csv_text, const QMatrix& q) {
    const auto rows = read_csv_cells(csv_text);
    std::vector<std::vector<int>> data;
    data.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != static_cast<std::size_t>(q.J()))
            fail(Errc::parse, "response row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " cells, expected J=" +
                                  std::to_string(q.J()));
        std::vector<int> r(rows[i].size());
        for (int j = 0; j < q.J(); ++j) {
            const auto v = parse_int(rows[i][static_cast<std::size_t>(j)]);
            if (!v || *v < 0 || *v > q.ncat(j))
                fail(Errc::parse, "response row " + std::to_string(i + 1) + ", item " +
                                      std::to_string(j + 1) + ": category out of range");
            r[static_cast<std::size_t>(j)] = static_cast<int>(*v);
        }
        data.push_back(std::move(r));
    }
    return data;
}

std::string response_table_to_csv(const std::vector<std::vector<int>>& data) {
    std::ostringstream out;
    for (const auto& row : data) {
        for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
        out << "\n";
    }
    return out.str();
}

} // namespace polydina
