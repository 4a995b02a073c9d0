#include "polydina/identnum.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polydina/rng.hpp"

namespace polydina {

namespace {

// =========================================================================
// small utilities
// =========================================================================

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int popcount32(std::uint32_t m) { return std::popcount(m); }

void require_no_zero_rows(const QMatrix& q) {
    for (int j = 0; j < q.J(); ++j)
        for (int l = 1; l <= q.ncat(j); ++l)
            if (q.row_mask(j, l) == 0)
                fail(Errc::precondition,
                     "Q-matrix contains an all-zero category row (item " + std::to_string(j + 1) +
                         ", category " + std::to_string(l) +
                         "); prune zero rows before running constructions");
}

std::vector<std::vector<double>> item_tables_for(const QMatrix& q, const ParamSet& s) {
    return s.model == ModelKind::Gpdina ? gpdina_item_tables(q, s.gpdina)
                                        : seq_item_tables(q, s.seq);
}

// Streaming walk over the canonical pattern order (r_J fastest) with
// per-level prefix products over profiles; visit(leaf products) runs once per
// pattern. Avoids materializing pattern-by-profile matrices.
template <typename Visit>
void walk_patterns(const std::vector<std::vector<double>>& tables, std::size_t nprof,
                   const std::vector<int>& ncat, Visit&& visit) {
    const int J = static_cast<int>(ncat.size());
    std::vector<std::vector<double>> prefix(static_cast<std::size_t>(J),
                                            std::vector<double>(nprof, 1.0));
    std::vector<int> r(static_cast<std::size_t>(J), 0);
    const std::vector<double> ones(nprof, 1.0);

    auto recompute = [&](int from) {
        for (int j = from; j < J; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const double* row = tables[sj].data() + static_cast<std::size_t>(r[sj]) * nprof;
            const double* src = (j == 0) ? ones.data() : prefix[sj - 1].data();
            double* dst = prefix[sj].data();
            for (std::size_t a = 0; a < nprof; ++a) dst[a] = src[a] * row[a];
        }
    };
    recompute(0);
    while (true) {
        visit(prefix[static_cast<std::size_t>(J) - 1]);
        int j = J - 1;
        while (j >= 0) {
            auto& rj = r[static_cast<std::size_t>(j)];
            if (++rj <= ncat[static_cast<std::size_t>(j)]) break;
            rj = 0;
            --j;
        }
        if (j < 0) return;
        recompute(j);
    }
}

std::vector<int> ncat_vector(const QMatrix& q) {
    std::vector<int> ncat(static_cast<std::size_t>(q.J()));
    for (int j = 0; j < q.J(); ++j) ncat[static_cast<std::size_t>(j)] = q.ncat(j);
    return ncat;
}

// Full distribution through the raw item tables (no parameter validation):
// the rank test needs the polynomial extension of the model map at finite-
// difference points that may sit just outside [0,1].
std::vector<double> distribution_from_tables(const std::vector<std::vector<double>>& tables,
                                             std::span<const double> p, std::size_t nprof,
                                             const std::vector<int>& ncat, std::size_t npat) {
    std::vector<double> out;
    out.reserve(npat);
    walk_patterns(tables, nprof, ncat, [&](const std::vector<double>& prod) {
        double s = 0.0;
        for (std::size_t a = 0; a < nprof; ++a) s += prod[a] * p[a];
        out.push_back(s);
    });
    return out;
}

// Pairs of profile indices split by one attribute bit, ascending, so that
// g1[i] = g0[i] + 2^k (the remaining bits agree position by position).
void group_indices(int K, int k, std::vector<std::size_t>& g0, std::vector<std::size_t>& g1) {
    g0.clear();
    g1.clear();
    for (std::size_t idx = 0; idx < num_profiles(K); ++idx)
        ((idx >> k) & 1u ? g1 : g0).push_back(idx);
}

double sum_at(const std::vector<double>& p, const std::vector<std::size_t>& idx) {
    double s = 0.0;
    for (const std::size_t i : idx) s += p[i];
    return s;
}

// =========================================================================
// damped Newton on a square system (finite-difference Jacobian)
// =========================================================================

struct NewtonOutcome {
    Eigen::VectorXd x;
    double residual = 0.0;
    int iterations = 0;
};

NewtonOutcome newton_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& F,
                           Eigen::VectorXd x) {
    constexpr double kStopTol = 1e-13;
    constexpr double kRequiredResidual = 1e-12;
    constexpr double kFdH = 1e-7;
    constexpr int kMaxIter = 200;
    const auto n = x.size();

    int it = 0;
    for (; it < kMaxIter; ++it) {
        const Eigen::VectorXd f = F(x);
        const double res = f.cwiseAbs().maxCoeff();
        if (res < kStopTol) break;
        Eigen::MatrixXd jac(f.size(), n);
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp[i] += kFdH;
            xm[i] -= kFdH;
            jac.col(i) = (F(xp) - F(xm)) / (2.0 * kFdH);
        }
        const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-f);
        double lam = 1.0;
        while (lam > 1e-8 && F(x + lam * step).cwiseAbs().maxCoeff() >= res) lam /= 2.0;
        x += lam * step;
    }
    const double res = F(x).cwiseAbs().maxCoeff();
    if (!(res < kRequiredResidual))
        fail(Errc::not_converged, "Newton solve stalled at residual " + fmt(res) + " after " +
                                      std::to_string(it) +
                                      " iterations (required < 1e-12); the construction pattern "
                                      "may be degenerate for these parameters");
    return {std::move(x), res, it};
}

// =========================================================================
// construction plumbing
// =========================================================================

bool kind_is_gpdina(ConstructionKind kind) {
    return kind == ConstructionKind::C1 || kind == ConstructionKind::C2 ||
           kind == ConstructionKind::C3;
}

void check_valid_original(const QMatrix& q, const ParamSet& s) {
    try {
        if (s.model == ModelKind::Gpdina)
            validate_gpdina_ordering(s.gpdina, q);
        else
            validate_seq_ordering(s.seq, q);
        validate_proportions(s.p, q.K);
    } catch (const Error& e) {
        fail(Errc::numeric,
             std::string("projected base parameters left the valid region (") + e.what() + ")");
    }
}

void check_valid_alternative(const QMatrix& q, const ParamSet& s) {
    try {
        if (s.model == ModelKind::Gpdina)
            validate_gpdina_ordering(s.gpdina, q);
        else
            validate_seq_ordering(s.seq, q);
        validate_proportions(s.p, q.K);
    } catch (const Error& e) {
        fail(Errc::numeric, std::string("constructed alternative parameters left the valid "
                                        "region (") +
                                e.what() + "); retry with a smaller eps");
    }
}

constexpr double kLadderKappa = 0.5;
constexpr double kLadderBudget = 0.95; // per-item sum ceiling for the plus ladder

// Projects item j's categories onto a geometric ladder theta_l = top *
// kappa^(l-1), shrinking the plus top when the category sum would exceed the
// budget. The ladder makes every higher-category marginal row a fixed
// multiple of the category-1 row, which reduces the construction to the
// category-1 system.
void ladder_project(GpdinaParams& par, const QMatrix& q, int j) {
    const auto sj = static_cast<std::size_t>(j);
    const int H = q.ncat(j);
    double s = 0.0, pw = 1.0;
    for (int l = 0; l < H; ++l, pw *= kLadderKappa) s += pw;
    double top = par.theta_plus[sj][0];
    if (top * s > kLadderBudget) top = kLadderBudget / s;
    const double mtop = par.theta_minus[sj][0];
    pw = 1.0;
    for (int l = 0; l < H; ++l, pw *= kLadderKappa) {
        par.theta_plus[sj][static_cast<std::size_t>(l)] = top * pw;
        par.theta_minus[sj][static_cast<std::size_t>(l)] = mtop * pw;
    }
}

void set_ladder(std::vector<double>& row, double top) {
    double pw = 1.0;
    for (auto& v : row) {
        v = top * pw;
        pw *= kLadderKappa;
    }
}

// ---------------------------------------------------------------- kind C1
// Item-level Q missing the unit row e_k: profiles 0 and e_k share every
// ideal response, so their T-matrix columns coincide and probability mass
// can be moved between them without touching the item parameters.
CounterexamplePair build_c1(const QMatrix& q, const ParamSet& base, double eps) {
    int missing = -1;
    for (int k = 0; k < q.K && missing < 0; ++k) {
        bool found = false;
        for (int j = 0; j < q.J() && !found; ++j)
            found = q.row_mask(j, 1) == (std::uint32_t{1} << k);
        if (!found) missing = k;
    }
    if (missing < 0)
        fail(Errc::precondition, "every unit row is present, so the mass-swap construction "
                                 "does not apply (the completeness condition holds)");

    CounterexamplePair pair;
    pair.model = ModelKind::Gpdina;
    pair.kind = ConstructionKind::C1;
    pair.eps = eps;
    pair.original = base;
    pair.alternative = base;
    const std::size_t ek = std::size_t{1} << missing;
    const double delta = std::min(eps, base.p[ek] / 2.0);
    pair.alternative.p[0] += delta;
    pair.alternative.p[ek] -= delta;
    pair.aux = {{"attribute", static_cast<double>(missing + 1)}, {"delta", delta}};
    return pair;
}

// ---------------------------------------------------------------- kind C2
// Attribute k required by at most two item rows, one of them a pure e_k
// anchor. Both items are ladder-projected, p is made proportional across the
// alpha_k split, and the category-1 moment system is solved for the barred
// tops and the group scalings (rho, u, v = c*u).
CounterexamplePair build_c2(const QMatrix& q, const ParamSet& base, double eps) {
    int tk = -1, tj1 = -1, tj2 = -1;
    for (int k = 0; k < q.K && tk < 0; ++k) {
        std::vector<int> req;
        for (int j = 0; j < q.J(); ++j)
            if (q.row_mask(j, 1) & (std::uint32_t{1} << k)) req.push_back(j);
        if (req.empty() || req.size() > 2) continue;
        int pure = -1;
        for (const int j : req)
            if (popcount32(q.row_mask(j, 1)) == 1) {
                pure = j;
                break;
            }
        if (pure < 0) continue;
        tk = k;
        tj1 = pure;
        for (const int j : req)
            if (j != pure) tj2 = j;
    }
    if (tk < 0)
        fail(Errc::precondition,
             "no attribute is required by at most two item rows with a pure single-attribute "
             "anchor; the two-row construction does not apply");

    ParamSet orig = base;
    ladder_project(orig.gpdina, q, tj1);
    if (tj2 >= 0) ladder_project(orig.gpdina, q, tj2);

    std::vector<std::size_t> g0, g1;
    group_indices(q.K, tk, g0, g1);
    const double c = sum_at(orig.p, g1) / sum_at(orig.p, g0);
    for (std::size_t i = 0; i < g0.size(); ++i) orig.p[g1[i]] = c * orig.p[g0[i]];

    const auto sj1 = static_cast<std::size_t>(tj1);
    const double a = orig.gpdina.theta_minus[sj1][0];
    const double A = orig.gpdina.theta_plus[sj1][0];

    double Abar = 0, abar = 0, Bbar = 0, bbar = 0, rho = 0, u = 0;
    NewtonOutcome sol;
    if (tj2 >= 0) {
        const auto sj2 = static_cast<std::size_t>(tj2);
        const double b = orig.gpdina.theta_minus[sj2][0];
        const double B = orig.gpdina.theta_plus[sj2][0];
        const bool pure_j2 = popcount32(q.row_mask(tj2, 1)) == 1;
        if (pure_j2) {
            Abar = A + eps;
            Bbar = B + eps / 2.0;
            auto F = [&](const Eigen::VectorXd& x) {
                const double ab = x[0], bb = x[1], r_ = x[2], u_ = x[3];
                const double vv = c * u_;
                Eigen::VectorXd f(4);
                f << 1.0 + r_ - u_ - vv,
                    ab + r_ * Abar - u_ * a - vv * A,
                    bb + r_ * Bbar - u_ * b - vv * B,
                    ab * bb + r_ * Abar * Bbar - u_ * a * b - vv * A * B;
                return f;
            };
            Eigen::VectorXd x0(4);
            x0 << a, b, c, 1.0;
            sol = newton_solve(F, x0);
            abar = sol.x[0];
            bbar = sol.x[1];
            rho = sol.x[2];
            u = sol.x[3];
        } else {
            // Extra attributes on the second item force theta_plus of the
            // anchor and theta_minus of the second item to stay fixed; the
            // eps perturbation moves to theta_plus of the second item.
            Abar = A;
            Bbar = B + eps;
            auto F = [&](const Eigen::VectorXd& x) {
                const double ab = x[0], r_ = x[1], u_ = x[2];
                const double vv = c * u_;
                Eigen::VectorXd f(3);
                f << 1.0 + r_ - u_ - vv,
                    ab + r_ * Abar - u_ * a - vv * A,
                    b + r_ * Bbar - u_ * b - vv * B;
                return f;
            };
            Eigen::VectorXd x0(3);
            x0 << a, c, 1.0;
            sol = newton_solve(F, x0);
            abar = sol.x[0];
            rho = sol.x[1];
            u = sol.x[2];
            bbar = b;
        }
    } else {
        // single requiring item: pins theta_minus, perturbs theta_plus
        Abar = A + eps;
        abar = a;
        auto F = [&](const Eigen::VectorXd& x) {
            const double r_ = x[0], u_ = x[1];
            const double vv = c * u_;
            Eigen::VectorXd f(2);
            f << 1.0 + r_ - u_ - vv, abar + r_ * Abar - u_ * a - vv * A;
            return f;
        };
        Eigen::VectorXd x0(2);
        x0 << c, 1.0;
        sol = newton_solve(F, x0);
        rho = sol.x[0];
        u = sol.x[1];
    }

    ParamSet alt = orig;
    set_ladder(alt.gpdina.theta_plus[sj1], Abar);
    set_ladder(alt.gpdina.theta_minus[sj1], abar);
    if (tj2 >= 0) {
        const auto sj2 = static_cast<std::size_t>(tj2);
        set_ladder(alt.gpdina.theta_plus[sj2], Bbar);
        set_ladder(alt.gpdina.theta_minus[sj2], bbar);
    }
    for (std::size_t i = 0; i < g0.size(); ++i) {
        alt.p[g0[i]] = orig.p[g0[i]] / u;
        alt.p[g1[i]] = rho * alt.p[g0[i]];
    }

    CounterexamplePair pair;
    pair.model = ModelKind::Gpdina;
    pair.kind = ConstructionKind::C2;
    pair.eps = eps;
    pair.original = std::move(orig);
    pair.alternative = std::move(alt);
    pair.aux = {{"attribute", static_cast<double>(tk + 1)},
                {"kappa", kLadderKappa},
                {"c", c},
                {"rho", rho},
                {"u", u},
                {"v", c * u},
                {"newton_residual", sol.residual},
                {"newton_iterations", static_cast<double>(sol.iterations)}};
    return pair;
}

// ---------------------------------------------------------------- kind C3
// Two attributes k1, k2 whose columns agree outside two pure anchor items.
// The anchors are ladder-projected, p is made proportional across the
// (alpha_k1, alpha_k2) groups, theta_minus of the first anchor is pinned at
// a + eps, and the four-moment system is solved for the second anchor's
// theta_minus and the group scalings (u, v, w).
CounterexamplePair build_c3(const QMatrix& q, const ParamSet& base, double eps) {
    int tk1 = -1, tk2 = -1, tj1 = -1, tj2 = -1;
    for (int k1 = 0; k1 < q.K && tj1 < 0; ++k1)
        for (int k2 = 0; k2 < q.K && tj1 < 0; ++k2) {
            if (k1 == k2) continue;
            const std::uint32_t e1 = std::uint32_t{1} << k1, e2 = std::uint32_t{1} << k2;
            for (int j1 = 0; j1 < q.J() && tj1 < 0; ++j1) {
                if (q.row_mask(j1, 1) != e1) continue;
                for (int j2 = 0; j2 < q.J() && tj1 < 0; ++j2) {
                    if (j2 == j1 || q.row_mask(j2, 1) != e2) continue;
                    bool ok = true;
                    for (int j = 0; j < q.J() && ok; ++j) {
                        if (j == j1 || j == j2) continue;
                        const std::uint32_t m = q.row_mask(j, 1);
                        ok = ((m >> k1) & 1u) == ((m >> k2) & 1u);
                    }
                    if (ok) {
                        tk1 = k1;
                        tk2 = k2;
                        tj1 = j1;
                        tj2 = j2;
                    }
                }
            }
        }
    if (tj1 < 0)
        fail(Errc::precondition,
             "no pair of pure anchor items leaves two attribute columns identical elsewhere; "
             "the indistinguishable-columns construction does not apply");

    ParamSet orig = base;
    ladder_project(orig.gpdina, q, tj1);
    ladder_project(orig.gpdina, q, tj2);

    // profile groups by (alpha_k1, alpha_k2), paired by the remaining bits
    std::vector<std::size_t> g00, g10, g01, g11;
    for (std::size_t idx = 0; idx < num_profiles(q.K); ++idx) {
        const int b1 = static_cast<int>((idx >> tk1) & 1u), b2 = static_cast<int>((idx >> tk2) & 1u);
        (b1 ? (b2 ? g11 : g10) : (b2 ? g01 : g00)).push_back(idx);
    }
    const double rho1 = sum_at(orig.p, g10) / sum_at(orig.p, g00);
    const double rho2 = sum_at(orig.p, g01) / sum_at(orig.p, g00);
    for (std::size_t i = 0; i < g00.size(); ++i) {
        orig.p[g10[i]] = rho1 * orig.p[g00[i]];
        orig.p[g01[i]] = rho2 * orig.p[g00[i]];
    }

    const auto sj1 = static_cast<std::size_t>(tj1), sj2 = static_cast<std::size_t>(tj2);
    const double a = orig.gpdina.theta_minus[sj1][0], A = orig.gpdina.theta_plus[sj1][0];
    const double b = orig.gpdina.theta_minus[sj2][0], B = orig.gpdina.theta_plus[sj2][0];
    const double abar = a + eps;

    auto F = [&](const Eigen::VectorXd& x) {
        const double bbar = x[0], u = x[1], v = x[2], w = x[3];
        Eigen::VectorXd f(4);
        f << u + v + w - (1.0 + rho1 + rho2),
            (u + w) * abar + v * A - ((1.0 + rho2) * a + rho1 * A),
            (u + v) * bbar + w * B - ((1.0 + rho1) * b + rho2 * B),
            u * abar * bbar + v * A * bbar + w * abar * B -
                (a * b + rho1 * A * b + rho2 * a * B);
        return f;
    };
    Eigen::VectorXd x0(4);
    x0 << b, 1.0, rho1, rho2;
    const NewtonOutcome sol = newton_solve(F, x0);
    const double bbar = sol.x[0], u = sol.x[1], v = sol.x[2], w = sol.x[3];

    ParamSet alt = orig;
    set_ladder(alt.gpdina.theta_minus[sj1], abar);
    set_ladder(alt.gpdina.theta_minus[sj2], bbar);
    for (std::size_t i = 0; i < g00.size(); ++i) {
        alt.p[g00[i]] = u * orig.p[g00[i]];
        alt.p[g10[i]] = v * orig.p[g00[i]];
        alt.p[g01[i]] = w * orig.p[g00[i]];
    }

    CounterexamplePair pair;
    pair.model = ModelKind::Gpdina;
    pair.kind = ConstructionKind::C3;
    pair.eps = eps;
    pair.original = std::move(orig);
    pair.alternative = std::move(alt);
    pair.aux = {{"attribute_1", static_cast<double>(tk1 + 1)},
                {"attribute_2", static_cast<double>(tk2 + 1)},
                {"kappa", kLadderKappa},
                {"rho1", rho1},
                {"rho2", rho2},
                {"u", u},
                {"v", v},
                {"w", w},
                {"newton_residual", sol.residual},
                {"newton_iterations", static_cast<double>(sol.iterations)}};
    return pair;
}

// --------------------------------------------------------------- NotId1/2
// Fixed four-item K=2 category-level patterns whose blocked two-category
// item sits last (NotId1) or third (NotId2). The base is projected onto the
// zero-guess boundary of that item's first category; the moment system then
// admits a one-parameter family pinned by eps.

struct Ex2Attrs {
    std::uint32_t ea = 0, eb = 0; // unit masks; profiles are the mask values
};

CounterexamplePair build_notid1(const QMatrix& q, const ParamSet& base, double eps) {
    const char* shape =
        "this construction needs the four-item pattern [e_a | e_b | e_b | (a&b),(e_a)] with K=2";
    if (q.K != 2 || q.J() != 4 || q.ncat(0) != 1 || q.ncat(1) != 1 || q.ncat(2) != 1 ||
        q.ncat(3) != 2)
        fail(Errc::precondition, shape);
    const std::uint32_t ea = q.row_mask(0, 1);
    if (popcount32(ea) != 1) fail(Errc::precondition, shape);
    const std::uint32_t eb = 3u ^ ea;
    if (q.row_mask(1, 1) != eb || q.row_mask(2, 1) != eb || q.row_mask(3, 1) != 3u ||
        q.row_mask(3, 2) != ea)
        fail(Errc::precondition, shape);

    ParamSet orig = base;
    orig.seq.beta_minus[3][0] = 0.0;
    const double b1 = orig.seq.beta_minus[0][0], A1 = orig.seq.beta_plus[0][0];
    const double b2 = orig.seq.beta_minus[1][0], A2 = orig.seq.beta_plus[1][0];
    const double B4 = orig.seq.beta_plus[3][0];
    const double p00 = orig.p[0], p10 = orig.p[ea], p01 = orig.p[eb], p11 = orig.p[3];
    const double p11b = p11 + eps;

    auto F = [&](const Eigen::VectorXd& x) {
        const double x00 = x[0], x10 = x[1], x01 = x[2], b1b = x[3], B4b = x[4];
        Eigen::VectorXd f(5);
        f << x00 + x10 + x01 + p11b - 1.0,
            x01 + p11b - (p01 + p11),
            b1b * (x00 + x01) + A1 * (x10 + p11b) - (b1 * (p00 + p01) + A1 * (p10 + p11)),
            b1b * b2 * x00 + b1b * A2 * x01 + A1 * b2 * x10 + A1 * A2 * p11b -
                (b1 * b2 * p00 + b1 * A2 * p01 + A1 * b2 * p10 + A1 * A2 * p11),
            B4b * p11b - B4 * p11;
        return f;
    };
    Eigen::VectorXd x0(5);
    x0 << p00, p10, p01, b1, B4;
    const NewtonOutcome sol = newton_solve(F, x0);

    ParamSet alt = orig;
    alt.seq.beta_minus[0][0] = sol.x[3];
    alt.seq.beta_plus[3][0] = sol.x[4];
    alt.p[0] = sol.x[0];
    alt.p[ea] = sol.x[1];
    alt.p[eb] = sol.x[2];
    alt.p[3] = p11b;

    CounterexamplePair pair;
    pair.model = ModelKind::Seq;
    pair.kind = ConstructionKind::NotId1;
    pair.eps = eps;
    pair.original = std::move(orig);
    pair.alternative = std::move(alt);
    pair.aux = {{"newton_residual", sol.residual},
                {"newton_iterations", static_cast<double>(sol.iterations)}};
    return pair;
}

CounterexamplePair build_notid2(const QMatrix& q, const ParamSet& base, double eps) {
    const char* shape =
        "this construction needs the four-item pattern [e_a | e_b | (a&b),(e_a) | (a&b)] with K=2";
    if (q.K != 2 || q.J() != 4 || q.ncat(0) != 1 || q.ncat(1) != 1 || q.ncat(2) != 2 ||
        q.ncat(3) != 1)
        fail(Errc::precondition, shape);
    const std::uint32_t ea = q.row_mask(0, 1);
    if (popcount32(ea) != 1) fail(Errc::precondition, shape);
    const std::uint32_t eb = 3u ^ ea;
    if (q.row_mask(1, 1) != eb || q.row_mask(2, 1) != 3u || q.row_mask(2, 2) != ea ||
        q.row_mask(3, 1) != 3u)
        fail(Errc::precondition, shape);

    ParamSet orig = base;
    orig.seq.beta_minus[2][0] = 0.0;
    const double b1 = orig.seq.beta_minus[0][0], A1 = orig.seq.beta_plus[0][0];
    const double b2 = orig.seq.beta_minus[1][0], A2 = orig.seq.beta_plus[1][0];
    const double p00 = orig.p[0], p10 = orig.p[ea], p01 = orig.p[eb], p11 = orig.p[3];
    const double b1b = b1 + eps;

    auto F = [&](const Eigen::VectorXd& x) {
        const double x00 = x[0], x10 = x[1], x01 = x[2], b2b = x[3];
        Eigen::VectorXd f(4);
        f << x00 + x10 + x01 - (p00 + p10 + p01),
            b1b * (x00 + x01) + A1 * (x10 + p11) - (b1 * (p00 + p01) + A1 * (p10 + p11)),
            b2b * (x00 + x10) + A2 * (x01 + p11) - (b2 * (p00 + p10) + A2 * (p01 + p11)),
            b1b * b2b * x00 + b1b * A2 * x01 + A1 * b2b * x10 + A1 * A2 * p11 -
                (b1 * b2 * p00 + b1 * A2 * p01 + A1 * b2 * p10 + A1 * A2 * p11);
        return f;
    };
    Eigen::VectorXd x0(4);
    x0 << p00, p10, p01, b2;
    const NewtonOutcome sol = newton_solve(F, x0);

    ParamSet alt = orig;
    alt.seq.beta_minus[0][0] = b1b;
    alt.seq.beta_minus[1][0] = sol.x[3];
    alt.p[0] = sol.x[0];
    alt.p[ea] = sol.x[1];
    alt.p[eb] = sol.x[2];

    CounterexamplePair pair;
    pair.model = ModelKind::Seq;
    pair.kind = ConstructionKind::NotId2;
    pair.eps = eps;
    pair.original = std::move(orig);
    pair.alternative = std::move(alt);
    pair.aux = {{"newton_residual", sol.residual},
                {"newton_iterations", static_cast<double>(sol.iterations)}};
    return pair;
}

// ------------------------------------------------------------ S1 boundary
// First-category submatrix missing the unit row e_k: with every item's
// first-category guessing probability projected to 0, profiles 0 and e_k
// are both blocked everywhere, so mass can be swapped between them exactly.
CounterexamplePair build_s1(const QMatrix& q, const ParamSet& base, double eps) {
    int missing = -1;
    for (int k = 0; k < q.K && missing < 0; ++k) {
        bool found = false;
        for (int j = 0; j < q.J() && !found; ++j)
            found = q.row_mask(j, 1) == (std::uint32_t{1} << k);
        if (!found) missing = k;
    }
    if (missing < 0)
        fail(Errc::precondition,
             "the first-category submatrix contains every unit row, so the zero-guess boundary "
             "construction does not apply");

    ParamSet orig = base;
    for (auto& row : orig.seq.beta_minus) row[0] = 0.0;

    CounterexamplePair pair;
    pair.model = ModelKind::Seq;
    pair.kind = ConstructionKind::S1_zero_guess;
    pair.eps = eps;
    const std::size_t ek = std::size_t{1} << missing;
    const double delta = std::min(eps, orig.p[ek] / 2.0);
    pair.alternative = orig;
    pair.alternative.p[0] += delta;
    pair.alternative.p[ek] -= delta;
    pair.original = std::move(orig);
    pair.aux = {{"attribute", static_cast<double>(missing + 1)}, {"delta", delta}};
    return pair;
}

// ----------------------------------------------------------------- S2star
// Attribute k appearing in at most two category rows: a pure first-category
// anchor (j1, 1), optionally joined by one more row (j2, l2) from a distinct
// item. The anchor's beta pair moves, the second row's beta_plus is pinned
// at B + eps, and p is made proportional across the alpha_k split.
CounterexamplePair build_s2star(const QMatrix& q, const ParamSet& base, double eps) {
    int tk = -1, tj1 = -1, tj2 = -1, tl2 = -1;
    for (int k = 0; k < q.K && tk < 0; ++k) {
        std::vector<std::pair<int, int>> occ; // (item, category-1), lexicographic
        for (int j = 0; j < q.J(); ++j)
            for (int l = 1; l <= q.ncat(j); ++l)
                if (q.row_mask(j, l) & (std::uint32_t{1} << k)) occ.emplace_back(j, l - 1);
        if (occ.empty() || occ.size() > 2) continue;
        const auto [ja, la] = occ.front();
        if (la != 0 || popcount32(q.row_mask(ja, 1)) != 1) continue;
        if (occ.size() == 2) {
            const auto [jb, lb] = occ.back();
            if (jb == ja) continue;
            tj2 = jb;
            tl2 = lb;
        }
        tk = k;
        tj1 = ja;
    }
    if (tk < 0)
        fail(Errc::precondition,
             "no attribute appears in at most two category rows (from distinct items) with a "
             "pure first-category anchor; the sparse-attribute construction does not apply");

    ParamSet orig = base;
    std::vector<std::size_t> g0, g1;
    group_indices(q.K, tk, g0, g1);
    const double c = sum_at(orig.p, g1) / sum_at(orig.p, g0);
    for (std::size_t i = 0; i < g0.size(); ++i) orig.p[g1[i]] = c * orig.p[g0[i]];

    const auto sj1 = static_cast<std::size_t>(tj1);
    const double a = orig.seq.beta_minus[sj1][0], A = orig.seq.beta_plus[sj1][0];

    ParamSet alt = orig;
    std::vector<std::pair<std::string, double>> aux;
    double rho = 0, u = 0;
    if (tj2 >= 0) {
        const auto sj2 = static_cast<std::size_t>(tj2), sl2 = static_cast<std::size_t>(tl2);
        const double b = orig.seq.beta_minus[sj2][sl2], B = orig.seq.beta_plus[sj2][sl2];
        const double Bbar = B + eps;
        auto F = [&](const Eigen::VectorXd& x) {
            const double ab = x[0], Ab = x[1], r_ = x[2], u_ = x[3], v_ = x[4];
            Eigen::VectorXd f(5);
            f << 1.0 + r_ - u_ - v_,
                b + r_ * Bbar - u_ * b - v_ * B,
                ab + r_ * Ab - u_ * a - v_ * A,
                ab * b + r_ * Ab * Bbar - u_ * a * b - v_ * A * B,
                v_ - c * u_;
            return f;
        };
        Eigen::VectorXd x0(5);
        x0 << a, A, c, 1.0, c;
        const NewtonOutcome sol = newton_solve(F, x0);
        alt.seq.beta_minus[sj1][0] = sol.x[0];
        alt.seq.beta_plus[sj1][0] = sol.x[1];
        alt.seq.beta_plus[sj2][sl2] = Bbar;
        rho = sol.x[2];
        u = sol.x[3];
        aux = {{"attribute", static_cast<double>(tk + 1)},
               {"c", c},
               {"rho", rho},
               {"u", u},
               {"v", sol.x[4]},
               {"newton_residual", sol.residual},
               {"newton_iterations", static_cast<double>(sol.iterations)}};
    } else {
        // single-row case: the anchor's beta_minus stays, beta_plus is pinned
        const double Abar = A + eps;
        auto F = [&](const Eigen::VectorXd& x) {
            const double r_ = x[0], u_ = x[1];
            const double vv = c * u_;
            Eigen::VectorXd f(2);
            f << 1.0 + r_ - u_ - vv, a + r_ * Abar - u_ * a - vv * A;
            return f;
        };
        Eigen::VectorXd x0(2);
        x0 << c, 1.0;
        const NewtonOutcome sol = newton_solve(F, x0);
        alt.seq.beta_plus[sj1][0] = Abar;
        rho = sol.x[0];
        u = sol.x[1];
        aux = {{"attribute", static_cast<double>(tk + 1)},
               {"c", c},
               {"rho", rho},
               {"u", u},
               {"v", c * u},
               {"newton_residual", sol.residual},
               {"newton_iterations", static_cast<double>(sol.iterations)}};
    }
    for (std::size_t i = 0; i < g0.size(); ++i) {
        alt.p[g0[i]] = orig.p[g0[i]] / u;
        alt.p[g1[i]] = rho * alt.p[g0[i]];
    }

    CounterexamplePair pair;
    pair.model = ModelKind::Seq;
    pair.kind = ConstructionKind::S2star;
    pair.eps = eps;
    pair.original = std::move(orig);
    pair.alternative = std::move(alt);
    pair.aux = std::move(aux);
    return pair;
}

// ----------------------------------------------------------------- S3star
// Two attributes k1, k2 whose columns agree on every category row except
// the pure first-category anchors of two distinct items. Both anchors'
// beta_minus move (the first pinned at b1 + eps) and p is reshaped across
// the four (alpha_k1, alpha_k2) groups, proportional to the (1,1) group.
CounterexamplePair build_s3star(const QMatrix& q, const ParamSet& base, double eps) {
    int tk1 = -1, tk2 = -1, tj1 = -1, tj2 = -1;
    for (int k1 = 0; k1 < q.K && tj1 < 0; ++k1)
        for (int k2 = 0; k2 < q.K && tj1 < 0; ++k2) {
            if (k1 == k2) continue;
            const std::uint32_t e1 = std::uint32_t{1} << k1, e2 = std::uint32_t{1} << k2;
            for (int j1 = 0; j1 < q.J() && tj1 < 0; ++j1) {
                if (q.row_mask(j1, 1) != e1) continue;
                for (int j2 = 0; j2 < q.J() && tj1 < 0; ++j2) {
                    if (j2 == j1 || q.row_mask(j2, 1) != e2) continue;
                    bool ok = true;
                    for (int j = 0; j < q.J() && ok; ++j)
                        for (int l = 1; l <= q.ncat(j) && ok; ++l) {
                            if ((j == j1 || j == j2) && l == 1) continue;
                            const std::uint32_t m = q.row_mask(j, l);
                            ok = ((m >> k1) & 1u) == ((m >> k2) & 1u);
                        }
                    if (ok) {
                        tk1 = k1;
                        tk2 = k2;
                        tj1 = j1;
                        tj2 = j2;
                    }
                }
            }
        }
    if (tj1 < 0)
        fail(Errc::precondition,
             "no pair of pure first-category anchors leaves two attribute columns identical on "
             "all other category rows; the paired-columns construction does not apply");

    ParamSet orig = base;
    std::vector<std::size_t> g00, g10, g01, g11;
    for (std::size_t idx = 0; idx < num_profiles(q.K); ++idx) {
        const int b1 = static_cast<int>((idx >> tk1) & 1u), b2 = static_cast<int>((idx >> tk2) & 1u);
        (b1 ? (b2 ? g11 : g10) : (b2 ? g01 : g00)).push_back(idx);
    }
    const double s11 = sum_at(orig.p, g11);
    const double rho1 = sum_at(orig.p, g00) / s11;
    const double rho2 = sum_at(orig.p, g10) / s11;
    const double rho3 = sum_at(orig.p, g01) / s11;
    for (std::size_t i = 0; i < g11.size(); ++i) {
        orig.p[g00[i]] = rho1 * orig.p[g11[i]];
        orig.p[g10[i]] = rho2 * orig.p[g11[i]];
        orig.p[g01[i]] = rho3 * orig.p[g11[i]];
    }

    const auto sj1 = static_cast<std::size_t>(tj1), sj2 = static_cast<std::size_t>(tj2);
    const double b1 = orig.seq.beta_minus[sj1][0], A1 = orig.seq.beta_plus[sj1][0];
    const double b2 = orig.seq.beta_minus[sj2][0], A2 = orig.seq.beta_plus[sj2][0];
    const double b1b = b1 + eps;

    auto F = [&](const Eigen::VectorXd& x) {
        const double b2b = x[0], u1 = x[1], u2 = x[2], u3 = x[3];
        Eigen::VectorXd f(4);
        f << rho1 + rho2 + rho3 - (u1 + u2 + u3),
            rho1 * b1 + rho2 * A1 + rho3 * b1 - (u1 * b1b + u2 * A1 + u3 * b1b),
            rho1 * b2 + rho2 * b2 + rho3 * A2 - (u1 * b2b + u2 * b2b + u3 * A2),
            rho1 * b1 * b2 + rho2 * A1 * b2 + rho3 * b1 * A2 -
                (u1 * b1b * b2b + u2 * A1 * b2b + u3 * b1b * A2);
        return f;
    };
    Eigen::VectorXd x0(4);
    x0 << b2, rho1, rho2, rho3;
    const NewtonOutcome sol = newton_solve(F, x0);
    const double b2b = sol.x[0], u1 = sol.x[1], u2 = sol.x[2], u3 = sol.x[3];

    ParamSet alt = orig;
    alt.seq.beta_minus[sj1][0] = b1b;
    alt.seq.beta_minus[sj2][0] = b2b;
    for (std::size_t i = 0; i < g11.size(); ++i) {
        alt.p[g00[i]] = u1 * orig.p[g11[i]];
        alt.p[g10[i]] = u2 * orig.p[g11[i]];
        alt.p[g01[i]] = u3 * orig.p[g11[i]];
    }

    CounterexamplePair pair;
    pair.model = ModelKind::Seq;
    pair.kind = ConstructionKind::S3star;
    pair.eps = eps;
    pair.original = std::move(orig);
    pair.alternative = std::move(alt);
    pair.aux = {{"attribute_1", static_cast<double>(tk1 + 1)},
                {"attribute_2", static_cast<double>(tk2 + 1)},
                {"rho1", rho1},
                {"rho2", rho2},
                {"rho3", rho3},
                {"u1", u1},
                {"u2", u2},
                {"u3", u3},
                {"newton_residual", sol.residual},
                {"newton_iterations", static_cast<double>(sol.iterations)}};
    return pair;
}

} // namespace

// =========================================================================
// public surface
// =========================================================================

std::string to_string(ConstructionKind kind) {
    switch (kind) {
    case ConstructionKind::C1: return "C1";
    case ConstructionKind::C2: return "C2";
    case ConstructionKind::C3: return "C3";
    case ConstructionKind::S1_zero_guess: return "S1_zero_guess";
    case ConstructionKind::NotId1: return "NotId1";
    case ConstructionKind::NotId2: return "NotId2";
    case ConstructionKind::S2star: return "S2star";
    case ConstructionKind::S3star: return "S3star";
    }
    fail(Errc::invalid_argument, "unknown construction kind");
}

ConstructionKind construction_kind_from_string(const std::string& name) {
    if (name == "C1") return ConstructionKind::C1;
    if (name == "C2") return ConstructionKind::C2;
    if (name == "C3") return ConstructionKind::C3;
    if (name == "S1_zero_guess") return ConstructionKind::S1_zero_guess;
    if (name == "NotId1") return ConstructionKind::NotId1;
    if (name == "NotId2") return ConstructionKind::NotId2;
    if (name == "S2star") return ConstructionKind::S2star;
    if (name == "S3star") return ConstructionKind::S3star;
    fail(Errc::invalid_argument,
         "unknown construction kind '" + name +
             "' (expected C1, C2, C3, S1_zero_guess, NotId1, NotId2, S2star or S3star)");
}

std::string to_string(RankVerdict v) {
    return v == RankVerdict::LocallyIdentifiable ? "locally_identifiable" : "rank_deficient";
}

double distribution_distance(const QMatrix& q, const ParamSet& a, const ParamSet& b) {
    q.validate();
    if (a.model != b.model)
        fail(Errc::invalid_argument, "distribution_distance requires two parameter sets of the "
                                     "same model kind");
    validate_param_set(a, q);
    validate_param_set(b, q);
    const auto ncat = ncat_vector(q);
    const PatternSpace space(ncat);
    if (space.size() > matrix_entry_cap())
        fail(Errc::size_cap, "pattern space size " + std::to_string(space.size()) +
                                 " exceeds the configured entry cap");
    const auto ta = item_tables_for(q, a);
    const auto tb = item_tables_for(q, b);
    const std::size_t nprof = num_profiles(q.K);

    // dual streaming walk: keep one prefix-product stack per parameter set
    const int J = q.J();
    std::vector<std::vector<double>> pa(static_cast<std::size_t>(J),
                                        std::vector<double>(nprof, 1.0));
    std::vector<std::vector<double>> pb = pa;
    std::vector<int> r(static_cast<std::size_t>(J), 0);
    const std::vector<double> ones(nprof, 1.0);
    auto recompute = [&](int from) {
        for (int j = from; j < J; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const double* rowa = ta[sj].data() + static_cast<std::size_t>(r[sj]) * nprof;
            const double* rowb = tb[sj].data() + static_cast<std::size_t>(r[sj]) * nprof;
            const double* srca = (j == 0) ? ones.data() : pa[sj - 1].data();
            const double* srcb = (j == 0) ? ones.data() : pb[sj - 1].data();
            for (std::size_t x = 0; x < nprof; ++x) {
                pa[sj][x] = srca[x] * rowa[x];
                pb[sj][x] = srcb[x] * rowb[x];
            }
        }
    };
    recompute(0);
    double sup = 0.0;
    while (true) {
        double da = 0.0, db = 0.0;
        const auto& la = pa[static_cast<std::size_t>(J) - 1];
        const auto& lb = pb[static_cast<std::size_t>(J) - 1];
        for (std::size_t x = 0; x < nprof; ++x) {
            da += la[x] * a.p[x];
            db += lb[x] * b.p[x];
        }
        sup = std::max(sup, std::abs(da - db));
        int j = J - 1;
        while (j >= 0) {
            auto& rj = r[static_cast<std::size_t>(j)];
            if (++rj <= q.ncat(j)) break;
            rj = 0;
            --j;
        }
        if (j < 0) break;
        recompute(j);
    }
    return sup;
}

RankReport jacobian_rank(const QMatrix& q, const ParamSet& params, double fd_step) {
    q.validate();
    validate_param_set(params, q);
    if (!(fd_step > 0))
        fail(Errc::invalid_argument, "finite-difference step must be positive");

    const auto ncat = ncat_vector(q);
    const PatternSpace space(ncat);
    const std::size_t npat = space.size();
    const std::size_t nprof = num_profiles(q.K);

    int nfree = 0;
    for (int j = 0; j < q.J(); ++j) nfree += 2 * q.ncat(j);
    const int ncols = nfree + static_cast<int>(nprof) - 1;
    if (npat < static_cast<std::size_t>(ncols))
        fail(Errc::precondition,
             "pattern space (" + std::to_string(npat) + ") is smaller than the parameter count (" +
                 std::to_string(ncols) + "); the Jacobian cannot have full column rank");
    if (npat > matrix_entry_cap() / static_cast<std::size_t>(ncols))
        fail(Errc::size_cap, "Jacobian of " + std::to_string(npat) + " x " +
                                 std::to_string(ncols) + " entries exceeds the configured cap");

    // interior envelope check
    bool interior = true;
    auto probe = [&](double v) {
        if (v < kInteriorMargin || v > 1.0 - kInteriorMargin) interior = false;
    };
    const auto& plus =
        params.model == ModelKind::Gpdina ? params.gpdina.theta_plus : params.seq.beta_plus;
    const auto& minus =
        params.model == ModelKind::Gpdina ? params.gpdina.theta_minus : params.seq.beta_minus;
    for (const auto& row : plus)
        for (const double v : row) probe(v);
    for (const auto& row : minus)
        for (const double v : row) probe(v);
    for (const double v : params.p) probe(v);

    // coordinate accessors: item parameters first (per item: plus categories,
    // then minus categories), then the p chart dropping the last coordinate
    auto evaluate = [&](const ParamSet& s) {
        return distribution_from_tables(item_tables_for(q, s), s.p, nprof, ncat, npat);
    };
    auto nudged = [&](int coord, double h) {
        ParamSet s = params;
        auto& pl = s.model == ModelKind::Gpdina ? s.gpdina.theta_plus : s.seq.beta_plus;
        auto& mi = s.model == ModelKind::Gpdina ? s.gpdina.theta_minus : s.seq.beta_minus;
        int c = coord;
        for (int j = 0; j < q.J(); ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const int H = q.ncat(j);
            if (c < H) {
                pl[sj][static_cast<std::size_t>(c)] += h;
                return s;
            }
            c -= H;
            if (c < H) {
                mi[sj][static_cast<std::size_t>(c)] += h;
                return s;
            }
            c -= H;
        }
        s.p[static_cast<std::size_t>(c)] += h;
        s.p.back() -= h;
        return s;
    };

    Eigen::MatrixXd jac(static_cast<Eigen::Index>(npat), ncols);
    for (int c = 0; c < ncols; ++c) {
        const auto up = evaluate(nudged(c, fd_step));
        const auto dn = evaluate(nudged(c, -fd_step));
        for (std::size_t i = 0; i < npat; ++i)
            jac(static_cast<Eigen::Index>(i), c) = (up[i] - dn[i]) / (2.0 * fd_step);
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(jac);
    const Eigen::VectorXd sigma = svd.singularValues();

    RankReport report;
    report.expected_full_rank = ncols;
    report.interior = interior;
    report.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
    const double smax = sigma.size() > 0 ? sigma[0] : 0.0;
    int rank = 0;
    if (smax > 0.0)
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma[i] > kRankSigmaTol * smax) ++rank;
    report.rank = rank;
    report.verdict = rank == ncols ? RankVerdict::LocallyIdentifiable : RankVerdict::RankDeficient;
    return report;
}

CounterexamplePair construct_counterexample(const QMatrix& q, ConstructionKind kind,
                                            const ParamSet& base, double eps) {
    q.validate();
    require_no_zero_rows(q);
    if (!(eps > 0.0) || !(eps < 1.0))
        fail(Errc::invalid_argument, "eps must lie in (0, 1)");
    const ModelKind want = kind_is_gpdina(kind) ? ModelKind::Gpdina : ModelKind::Seq;
    if (q.kind != want || base.model != want)
        fail(Errc::invalid_argument, "construction " + to_string(kind) + " needs a " +
                                         to_string(want) + " Q-matrix and parameter set");
    // the base itself must be a fully valid model configuration
    if (want == ModelKind::Gpdina)
        validate_gpdina_ordering(base.gpdina, q);
    else
        validate_seq_ordering(base.seq, q);
    validate_proportions(base.p, q.K);

    CounterexamplePair pair;
    switch (kind) {
    case ConstructionKind::C1: pair = build_c1(q, base, eps); break;
    case ConstructionKind::C2: pair = build_c2(q, base, eps); break;
    case ConstructionKind::C3: pair = build_c3(q, base, eps); break;
    case ConstructionKind::S1_zero_guess: pair = build_s1(q, base, eps); break;
    case ConstructionKind::NotId1: pair = build_notid1(q, base, eps); break;
    case ConstructionKind::NotId2: pair = build_notid2(q, base, eps); break;
    case ConstructionKind::S2star: pair = build_s2star(q, base, eps); break;
    case ConstructionKind::S3star: pair = build_s3star(q, base, eps); break;
    }
    check_valid_original(q, pair.original);
    check_valid_alternative(q, pair.alternative);
    return pair;
}

namespace {

double linf_param_distance(const ParamSet& x, const ParamSet& y) {
    double d = 0.0;
    auto acc = [&](const std::vector<std::vector<double>>& a,
                   const std::vector<std::vector<double>>& b) {
        for (std::size_t j = 0; j < a.size(); ++j)
            for (std::size_t l = 0; l < a[j].size(); ++l)
                d = std::max(d, std::abs(a[j][l] - b[j][l]));
    };
    if (x.model == ModelKind::Gpdina) {
        acc(x.gpdina.theta_plus, y.gpdina.theta_plus);
        acc(x.gpdina.theta_minus, y.gpdina.theta_minus);
    } else {
        acc(x.seq.beta_plus, y.seq.beta_plus);
        acc(x.seq.beta_minus, y.seq.beta_minus);
    }
    for (std::size_t i = 0; i < x.p.size(); ++i) d = std::max(d, std::abs(x.p[i] - y.p[i]));
    return d;
}

} // namespace

VerifyReport verify_counterexample(const CounterexamplePair& pair, const QMatrix& q) {
    if (pair.original.model != pair.model || pair.alternative.model != pair.model)
        fail(Errc::invalid_argument, "counterexample pair has inconsistent model kinds");
    VerifyReport report;
    report.param_distance = linf_param_distance(pair.original, pair.alternative);
    report.dist_distance = distribution_distance(q, pair.original, pair.alternative);
    report.pass = report.dist_distance <= kPairDistTol &&
                  report.param_distance >= std::min(pair.eps / 2.0, kPairParamFloor);
    return report;
}

ParamSet random_interior_params(const QMatrix& q, ModelKind model, std::uint64_t seed) {
    q.validate();
    Rng rng(seed);
    ParamSet s;
    s.model = model;
    if (model == ModelKind::Gpdina) {
        s.gpdina.theta_plus.resize(static_cast<std::size_t>(q.J()));
        s.gpdina.theta_minus.resize(static_cast<std::size_t>(q.J()));
        for (int j = 0; j < q.J(); ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const int H = q.ncat(j);
            auto& tp = s.gpdina.theta_plus[sj];
            auto& tm = s.gpdina.theta_minus[sj];
            tp.resize(static_cast<std::size_t>(H));
            tm.resize(static_cast<std::size_t>(H));
            double sum = 0.0;
            for (int l = 0; l < H; ++l) {
                const double lo = rng.uniform(0.05, 0.15);
                const double gap = rng.uniform(0.25, 0.45);
                tm[static_cast<std::size_t>(l)] = lo;
                tp[static_cast<std::size_t>(l)] = lo + gap;
                sum += lo + gap;
            }
            if (sum > 0.95) {
                const double scale = 0.95 / sum;
                for (int l = 0; l < H; ++l) {
                    tp[static_cast<std::size_t>(l)] *= scale;
                    tm[static_cast<std::size_t>(l)] *= scale;
                }
            }
        }
    } else {
        s.seq.beta_plus.resize(static_cast<std::size_t>(q.J()));
        s.seq.beta_minus.resize(static_cast<std::size_t>(q.J()));
        for (int j = 0; j < q.J(); ++j) {
            const auto sj = static_cast<std::size_t>(j);
            const int H = q.ncat(j);
            s.seq.beta_plus[sj].resize(static_cast<std::size_t>(H));
            s.seq.beta_minus[sj].resize(static_cast<std::size_t>(H));
            for (int l = 0; l < H; ++l) {
                s.seq.beta_plus[sj][static_cast<std::size_t>(l)] = rng.uniform(0.6, 0.9);
                s.seq.beta_minus[sj][static_cast<std::size_t>(l)] = rng.uniform(0.1, 0.4);
            }
        }
    }
    const std::size_t nprof = num_profiles(q.K);
    s.p.resize(nprof);
    double total = 0.0;
    for (auto& v : s.p) {
        v = rng.uniform(0.5, 1.5);
        total += v;
    }
    for (auto& v : s.p) v /= total;
    return s;
}

ParamSet default_params_for(const QMatrix& q, ConstructionKind kind, std::uint64_t seed) {
    return random_interior_params(q, kind_is_gpdina(kind) ? ModelKind::Gpdina : ModelKind::Seq,
                                  seed);
}

std::string pair_to_json(const CounterexamplePair& pair, const VerifyReport& verify) {
    nlohmann::json j;
    j["model"] = to_string(pair.model);
    j["kind"] = to_string(pair.kind);
    j["eps"] = pair.eps;
    j["original"] = nlohmann::json::parse(param_set_to_json(pair.original));
    j["alternative"] = nlohmann::json::parse(param_set_to_json(pair.alternative));
    nlohmann::json aux = nlohmann::json::object();
    for (const auto& [name, value] : pair.aux) aux[name] = value;
    j["aux"] = std::move(aux);
    j["verify"] = {{"param_distance", verify.param_distance},
                   {"dist_distance", verify.dist_distance},
                   {"pass", verify.pass}};
    return j.dump(2);
}

std::string rank_report_to_json(const RankReport& report) {
    nlohmann::json j;
    j["rank"] = report.rank;
    j["expected_full_rank"] = report.expected_full_rank;
    j["interior"] = report.interior;
    j["verdict"] = to_string(report.verdict);
    j["singular_values"] = report.singular_values;
    return j.dump(2);
}

} // namespace polydina
