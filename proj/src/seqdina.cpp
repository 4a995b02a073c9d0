#include "polydina/seqdina.hpp"

#include <cmath>
#include <string>

#include "polydina/rng.hpp"

namespace polydina {

namespace {

void check_shapes(const SeqParams& par, const QMatrix& q) {
    if (par.beta_plus.size() != static_cast<std::size_t>(q.J()) ||
        par.beta_minus.size() != static_cast<std::size_t>(q.J()))
        fail(Errc::invalid_argument, "parameter shape mismatch: expected J=" +
                                         std::to_string(q.J()) + " items");
    for (int j = 0; j < q.J(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (par.beta_plus[sj].size() != static_cast<std::size_t>(q.ncat(j)) ||
            par.beta_minus[sj].size() != static_cast<std::size_t>(q.ncat(j)))
            fail(Errc::invalid_argument, "item " + std::to_string(j + 1) +
                                             ": expected H_j=" + std::to_string(q.ncat(j)) +
                                             " category parameters");
    }
}

} // namespace

void validate_seq_bounds(const SeqParams& par, const QMatrix& q) {
    check_shapes(par, q);
    for (int j = 0; j < q.J(); ++j)
        for (int l = 0; l < q.ncat(j); ++l) {
            const double bp = par.beta_plus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
            const double bm = par.beta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)];
            if (!(bp >= 0.0 && bp <= 1.0) || !(bm >= 0.0 && bm <= 1.0))
                fail(Errc::invalid_argument, "item " + std::to_string(j + 1) + " category " +
                                                 std::to_string(l + 1) +
                                                 ": probability outside [0,1]");
        }
}

void validate_seq_ordering(const SeqParams& par, const QMatrix& q) {
    validate_seq_bounds(par, q);
    for (int j = 0; j < q.J(); ++j)
        for (int l = 0; l < q.ncat(j); ++l)
            if (!(par.beta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] <
                  par.beta_plus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]))
                fail(Errc::invalid_argument,
                     "item " + std::to_string(j + 1) + " category " + std::to_string(l + 1) +
                         ": requires beta_minus < beta_plus");
}

SeqParams normalize_cascade(const SeqParams& par, const QMatrix& q) {
    validate_seq_bounds(par, q);
    for (int j = 0; j < q.J(); ++j)
        for (int l = 0; l < q.ncat(j); ++l)
            if (par.beta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] >
                par.beta_plus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)])
                fail(Errc::invalid_argument,
                     "item " + std::to_string(j + 1) + " category " + std::to_string(l + 1) +
                         ": beta_minus exceeds beta_plus");
    // The zero-guess cascade is profile-conditional, so the canonical stored
    // form equals the input; evaluation consults seq_blocked_from.
    return par;
}

int seq_blocked_from(const QMatrix& q, const SeqParams& par, int j, Profile a) {
    const auto sj = static_cast<std::size_t>(j);
    for (int l = 1; l <= q.ncat(j); ++l)
        if (par.beta_minus[sj][static_cast<std::size_t>(l) - 1] == 0.0 &&
            !mask_dominates(a, q.row_mask(j, l)))
            return l;
    return q.ncat(j) + 1;
}

double processing_probability(const QMatrix& q, const SeqParams& par, int j, int l, Profile a) {
    if (j < 0 || j >= q.J() || l < 0 || l > q.ncat(j) + 1)
        fail(Errc::invalid_argument, "processing_probability: index out of range");
    if (l == 0) return 1.0;
    if (l == q.ncat(j) + 1) return 0.0;
    if (l > seq_blocked_from(q, par, j, a)) return 0.0; // cascade zeroing
    const auto sj = static_cast<std::size_t>(j);
    const bool xi = mask_dominates(a, q.row_mask(j, l));
    return xi ? par.beta_plus[sj][static_cast<std::size_t>(l) - 1]
              : par.beta_minus[sj][static_cast<std::size_t>(l) - 1];
}

double cumulative_prob(const QMatrix& q, const SeqParams& par, int j, int rj, Profile a) {
    if (rj < 0 || rj > q.ncat(j) + 1)
        fail(Errc::invalid_argument, "cumulative_prob: category out of range");
    double prod = 1.0;
    for (int l = 1; l <= rj; ++l) {
        prod *= processing_probability(q, par, j, l, a);
        if (prod == 0.0) break;
    }
    return prod;
}

double seq_item_pmf(const QMatrix& q, const SeqParams& par, int j, int rj, Profile a) {
    const double reach = cumulative_prob(q, par, j, rj, a);
    const double advance = processing_probability(q, par, j, rj + 1, a);
    return reach * (1.0 - advance);
}

std::vector<std::vector<double>> seq_item_tables(const QMatrix& q, const SeqParams& par) {
    check_shapes(par, q);
    const std::size_t nprof = num_profiles(q.K);
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) {
        auto& tab = tables[static_cast<std::size_t>(j)];
        tab.resize(static_cast<std::size_t>(q.ncat(j) + 1) * nprof);
        for (Profile a = 0; a < nprof; ++a) {
            // single pass down the category chain per profile
            double reach = 1.0;
            for (int l = 0; l <= q.ncat(j); ++l) {
                const double advance = processing_probability(q, par, j, l + 1, a);
                tab[static_cast<std::size_t>(l) * nprof + a] = reach * (1.0 - advance);
                reach *= advance;
            }
        }
    }
    return tables;
}

std::vector<std::vector<double>> seq_cumulative_tables(const QMatrix& q, const SeqParams& par) {
    check_shapes(par, q);
    const std::size_t nprof = num_profiles(q.K);
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) {
        auto& tab = tables[static_cast<std::size_t>(j)];
        tab.resize(static_cast<std::size_t>(q.ncat(j) + 1) * nprof);
        for (Profile a = 0; a < nprof; ++a) {
            double reach = 1.0;
            for (int l = 0; l <= q.ncat(j); ++l) {
                tab[static_cast<std::size_t>(l) * nprof + a] = reach;
                reach *= processing_probability(q, par, j, l + 1, a);
            }
        }
    }
    return tables;
}

namespace {

// Same canonical-order walk as the GPDINA module; kept local to each TU on
// purpose (the modules do not share evaluation code paths).
void full_distribution_walk(const std::vector<std::vector<double>>& tables,
                            std::span<const double> p, std::size_t nprof,
                            std::vector<double>& out) {
    const int J = static_cast<int>(tables.size());
    std::vector<std::vector<double>> stack(static_cast<std::size_t>(J) + 1,
                                           std::vector<double>(nprof, 1.0));
    std::vector<int> level_cat(static_cast<std::size_t>(J), 0);
    out.clear();
    int depth = 0;
    while (true) {
        if (depth == J) {
            double s = 0.0;
            const auto& prod = stack[static_cast<std::size_t>(J)];
            for (std::size_t a = 0; a < nprof; ++a) s += prod[a] * p[a];
            out.push_back(s);
            --depth;
            while (depth >= 0) {
                const int ncat_here =
                    static_cast<int>(tables[static_cast<std::size_t>(depth)].size() / nprof) - 1;
                if (level_cat[static_cast<std::size_t>(depth)] < ncat_here) {
                    ++level_cat[static_cast<std::size_t>(depth)];
                    break;
                }
                level_cat[static_cast<std::size_t>(depth)] = 0;
                --depth;
            }
            if (depth < 0) return;
        }
        const auto& tab = tables[static_cast<std::size_t>(depth)];
        const int l = level_cat[static_cast<std::size_t>(depth)];
        const auto& src = stack[static_cast<std::size_t>(depth)];
        auto& dst = stack[static_cast<std::size_t>(depth) + 1];
        const double* row = tab.data() + static_cast<std::size_t>(l) * nprof;
        for (std::size_t a = 0; a < nprof; ++a) dst[a] = src[a] * row[a];
        ++depth;
    }
}

} // namespace

double seq_marginal_prob(const QMatrix& q, const SeqParams& par,
                         std::span<const double> p, std::span<const int> r) {
    check_shapes(par, q);
    validate_proportions(p, q.K);
    if (r.size() != static_cast<std::size_t>(q.J()))
        fail(Errc::invalid_argument, "pattern length mismatch");
    const std::size_t nprof = num_profiles(q.K);
    double total = 0.0;
    for (Profile a = 0; a < nprof; ++a) {
        double prod = p[a];
        for (int j = 0; j < q.J(); ++j)
            prod *= seq_item_pmf(q, par, j, r[static_cast<std::size_t>(j)], a);
        total += prod;
    }
    return total;
}

std::vector<double> seq_full_distribution(const QMatrix& q, const SeqParams& par,
                                          std::span<const double> p) {
    validate_seq_bounds(par, q);
    validate_proportions(p, q.K);
    const auto tables = seq_item_tables(q, par);
    std::vector<double> out;
    out.reserve(PatternSpace::of(q).size());
    full_distribution_walk(tables, p, num_profiles(q.K), out);
    return out;
}

TMatrix build_ts_matrix(const QMatrix& q, const SeqParams& par) {
    validate_seq_bounds(par, q);
    PatternSpace space = PatternSpace::of(q);
    const std::size_t nprof = num_profiles(q.K);
    if (space.size() > matrix_entry_cap() / nprof)
        fail(Errc::size_cap, "T^s-matrix would need " + std::to_string(space.size()) + " x " +
                                 std::to_string(nprof) + " entries, above the cap of " +
                                 std::to_string(matrix_entry_cap()) +
                                 " (set POLYDINA_MATRIX_CAP to raise)");
    const auto cum = seq_cumulative_tables(q, par);
    TMatrix t{std::move(space), q.K, {}};
    t.data.assign(t.rows() * nprof, 1.0);
    std::vector<int> r(static_cast<std::size_t>(q.J()), 0);
    std::size_t row = 0;
    do {
        for (int j = 0; j < q.J(); ++j) {
            const int rj = r[static_cast<std::size_t>(j)];
            if (rj == 0) continue;
            const double* col = cum[static_cast<std::size_t>(j)].data() +
                                static_cast<std::size_t>(rj) * nprof;
            for (Profile a = 0; a < nprof; ++a) t.at(row, a) *= col[a];
        }
        ++row;
    } while (t.patterns.next(r));
    return t;
}

std::vector<std::vector<int>> seq_sample(const QMatrix& q, const SeqParams& par,
                                         std::span<const double> p, std::size_t n,
                                         std::uint64_t seed) {
    validate_seq_bounds(par, q);
    validate_proportions(p, q.K);
    if (n < 1) fail(Errc::invalid_argument, "sample size must be >= 1");
    Rng rng(seed);
    std::vector<std::vector<int>> data(n, std::vector<int>(static_cast<std::size_t>(q.J())));
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<Profile>(rng.categorical(p));
        for (int j = 0; j < q.J(); ++j) {
            int reached = 0;
            for (int l = 1; l <= q.ncat(j); ++l) {
                const double pass = processing_probability(q, par, j, l, a);
                if (rng.uniform01() < pass)
                    reached = l;
                else
                    break;
            }
            data[i][static_cast<std::size_t>(j)] = reached;
        }
    }
    return data;
}

} // namespace polydina
