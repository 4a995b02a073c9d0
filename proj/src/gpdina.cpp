#include "polydina/gpdina.hpp"

#include <cmath>
#include <string>

#include "polydina/rng.hpp"

namespace polydina {

namespace {

constexpr double kSumSlack = 1e-12; // tolerance on sum_l theta_{j,l} <= 1

void check_shapes(const GpdinaParams& par, const QMatrix& q) {
    if (par.theta_plus.size() != static_cast<std::size_t>(q.J()) ||
        par.theta_minus.size() != static_cast<std::size_t>(q.J()))
        fail(Errc::invalid_argument, "parameter shape mismatch: expected J=" +
                                         std::to_string(q.J()) + " items");
    for (int j = 0; j < q.J(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (par.theta_plus[sj].size() != static_cast<std::size_t>(q.ncat(j)) ||
            par.theta_minus[sj].size() != static_cast<std::size_t>(q.ncat(j)))
            fail(Errc::invalid_argument, "item " + std::to_string(j + 1) +
                                             ": expected H_j=" + std::to_string(q.ncat(j)) +
                                             " category parameters");
    }
}

} // namespace

void validate_gpdina_bounds(const GpdinaParams& par, const QMatrix& q) {
    check_shapes(par, q);
    for (int j = 0; j < q.J(); ++j) {
        const auto sj = static_cast<std::size_t>(j);
        double sum_plus = 0.0, sum_minus = 0.0;
        for (int l = 0; l < q.ncat(j); ++l) {
            const double tp = par.theta_plus[sj][static_cast<std::size_t>(l)];
            const double tm = par.theta_minus[sj][static_cast<std::size_t>(l)];
            if (!(tp >= 0.0 && tp <= 1.0) || !(tm >= 0.0 && tm <= 1.0))
                fail(Errc::invalid_argument, "item " + std::to_string(j + 1) + " category " +
                                                 std::to_string(l + 1) +
                                                 ": probability outside [0,1]");
            sum_plus += tp;
            sum_minus += tm;
        }
        if (sum_plus > 1.0 + kSumSlack || sum_minus > 1.0 + kSumSlack)
            fail(Errc::invalid_argument, "item " + std::to_string(j + 1) +
                                             ": category probabilities sum past 1");
    }
}

void validate_gpdina_ordering(const GpdinaParams& par, const QMatrix& q) {
    validate_gpdina_bounds(par, q);
    for (int j = 0; j < q.J(); ++j)
        for (int l = 0; l < q.ncat(j); ++l)
            if (!(par.theta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] <
                  par.theta_plus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)]))
                fail(Errc::invalid_argument,
                     "item " + std::to_string(j + 1) + " category " + std::to_string(l + 1) +
                         ": requires theta_minus < theta_plus");
}

double gpdina_category_pmf(const QMatrix& q, const GpdinaParams& par, int j, int l, Profile a) {
    if (j < 0 || j >= q.J() || l < 0 || l > q.ncat(j))
        fail(Errc::invalid_argument, "category_pmf: index out of range");
    const auto sj = static_cast<std::size_t>(j);
    const bool xi = mask_dominates(a, q.row_mask(j, 1));
    const auto& theta = xi ? par.theta_plus[sj] : par.theta_minus[sj];
    if (l >= 1) return theta[static_cast<std::size_t>(l) - 1];
    double sum = 0.0;
    for (const double t : theta) sum += t;
    return 1.0 - sum;
}

std::vector<std::vector<double>> gpdina_item_tables(const QMatrix& q, const GpdinaParams& par) {
    check_shapes(par, q);
    const std::size_t nprof = num_profiles(q.K);
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) {
        auto& tab = tables[static_cast<std::size_t>(j)];
        tab.resize(static_cast<std::size_t>(q.ncat(j) + 1) * nprof);
        for (Profile a = 0; a < nprof; ++a)
            for (int l = 0; l <= q.ncat(j); ++l)
                tab[static_cast<std::size_t>(l) * nprof + a] = gpdina_category_pmf(q, par, j, l, a);
    }
    return tables;
}

double gpdina_marginal_prob(const QMatrix& q, const GpdinaParams& par,
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
            prod *= gpdina_category_pmf(q, par, j, r[static_cast<std::size_t>(j)], a);
        total += prod;
    }
    return total;
}

namespace {

// Shared depth-first full-distribution walk over the canonical pattern order:
// maintains the per-profile running product and emits one probability per
// pattern. Works for any per-item response tables.
void full_distribution_walk(const std::vector<std::vector<double>>& tables,
                            std::span<const double> p, std::size_t nprof,
                            std::vector<double>& out) {
    const int J = static_cast<int>(tables.size());
    std::vector<std::vector<double>> stack(static_cast<std::size_t>(J) + 1,
                                           std::vector<double>(nprof, 1.0));
    std::vector<int> level_cat(static_cast<std::size_t>(J), 0);
    out.clear();

    // iterative DFS in canonical (r_J fastest) order
    int depth = 0;
    while (true) {
        if (depth == J) {
            double s = 0.0;
            const auto& prod = stack[static_cast<std::size_t>(J)];
            for (std::size_t a = 0; a < nprof; ++a) s += prod[a] * p[a];
            out.push_back(s);
            // backtrack to the deepest level with categories left
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
        // extend: multiply level table row into the running product
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

std::vector<double> gpdina_full_distribution(const QMatrix& q, const GpdinaParams& par,
                                             std::span<const double> p) {
    validate_gpdina_bounds(par, q);
    validate_proportions(p, q.K);
    const auto tables = gpdina_item_tables(q, par);
    std::vector<double> out;
    out.reserve(PatternSpace::of(q).size());
    full_distribution_walk(tables, p, num_profiles(q.K), out);
    return out;
}

TMatrix build_t_matrix(const QMatrix& q, const GpdinaParams& par) {
    validate_gpdina_bounds(par, q);
    PatternSpace space = PatternSpace::of(q);
    const std::size_t nprof = num_profiles(q.K);
    if (space.size() > matrix_entry_cap() / nprof)
        fail(Errc::size_cap, "T-matrix would need " + std::to_string(space.size()) + " x " +
                                 std::to_string(nprof) + " entries, above the cap of " +
                                 std::to_string(matrix_entry_cap()) +
                                 " (set POLYDINA_MATRIX_CAP to raise)");
    TMatrix t{std::move(space), q.K, {}};
    t.data.assign(t.rows() * nprof, 1.0);
    std::vector<int> r(static_cast<std::size_t>(q.J()), 0);
    std::size_t row = 0;
    do {
        for (int j = 0; j < q.J(); ++j) {
            const int rj = r[static_cast<std::size_t>(j)];
            if (rj == 0) continue; // item not part of the marginal event
            for (Profile a = 0; a < nprof; ++a)
                t.at(row, a) *= gpdina_category_pmf(q, par, j, rj, a);
        }
        ++row;
    } while (t.patterns.next(r));
    return t;
}

std::vector<std::vector<int>> gpdina_sample(const QMatrix& q, const GpdinaParams& par,
                                            std::span<const double> p, std::size_t n,
                                            std::uint64_t seed) {
    validate_gpdina_bounds(par, q);
    validate_proportions(p, q.K);
    if (n < 1) fail(Errc::invalid_argument, "sample size must be >= 1");
    const auto tables = gpdina_item_tables(q, par);
    const std::size_t nprof = num_profiles(q.K);
    Rng rng(seed);
    std::vector<std::vector<int>> data(n, std::vector<int>(static_cast<std::size_t>(q.J())));
    std::vector<double> cat_weights;
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = static_cast<Profile>(rng.categorical(p));
        for (int j = 0; j < q.J(); ++j) {
            const auto& tab = tables[static_cast<std::size_t>(j)];
            cat_weights.resize(static_cast<std::size_t>(q.ncat(j)) + 1);
            for (int l = 0; l <= q.ncat(j); ++l)
                cat_weights[static_cast<std::size_t>(l)] =
                    std::max(0.0, tab[static_cast<std::size_t>(l) * nprof + a]);
            data[i][static_cast<std::size_t>(j)] = rng.categorical(cat_weights);
        }
    }
    return data;
}

} // namespace polydina
