// Cross-checks the optimized distribution and matrix builders against an
// independent brute-force enumerator written from the model definitions.
// The oracle deliberately shares no evaluation code with the library: it
// walks explicit profile bit-vectors and multiplies scalar probabilities one
// category at a time.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "polydina/core.hpp"
#include "polydina/gpdina.hpp"
#include "polydina/seqdina.hpp"

namespace {

using namespace polydina;

constexpr double kAgreementTol = 1e-12;

// ---------------------------------------------------------------------------
// oracle: item-level model
// ---------------------------------------------------------------------------

// P(R_j = l | a) from the definition: the dominating branch uses theta_plus,
// the other theta_minus; category 0 is one minus the sum over the others.
double oracle_gpdina_pmf(const QMatrix& q, const GpdinaParams& par, int j, int l,
                         const std::vector<int>& a) {
    const int xi = ideal_response(q.row_bits(j, 1), a);
    const auto& branch = xi == 1 ? par.theta_plus[static_cast<std::size_t>(j)]
                                 : par.theta_minus[static_cast<std::size_t>(j)];
    if (l >= 1) return branch[static_cast<std::size_t>(l) - 1];
    double sum = 0.0;
    for (const double v : branch) sum += v;
    return 1.0 - sum;
}

double oracle_gpdina_prob(const QMatrix& q, const GpdinaParams& par,
                          const std::vector<double>& p, const std::vector<int>& r) {
    const auto profiles = enumerate_profiles(q.K);
    double total = 0.0;
    for (std::size_t a = 0; a < profiles.size(); ++a) {
        double prod = p[a];
        for (int j = 0; j < q.J(); ++j)
            prod *= oracle_gpdina_pmf(q, par, j, r[static_cast<std::size_t>(j)], profiles[a]);
        total += prod;
    }
    return total;
}

// ---------------------------------------------------------------------------
// oracle: sequential model
// ---------------------------------------------------------------------------

// S_j(l | a), with the zero-guessing cascade applied from the first category
// whose minus branch is exactly zero for a profile that lacks its attributes.
double oracle_seq_step(const QMatrix& q, const SeqParams& par, int j, int l,
                       const std::vector<int>& a) {
    if (l == 0) return 1.0;
    if (l > q.ncat(j)) return 0.0;
    for (int m = 1; m <= l; ++m) {
        const int xi_m = ideal_response(q.row_bits(j, m), a);
        if (xi_m == 0 && par.beta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(m) - 1] == 0.0)
            return 0.0; // blocked at m <= l
    }
    const int xi = ideal_response(q.row_bits(j, l), a);
    return xi == 1 ? par.beta_plus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l) - 1]
                   : par.beta_minus[static_cast<std::size_t>(j)][static_cast<std::size_t>(l) - 1];
}

double oracle_seq_cumulative(const QMatrix& q, const SeqParams& par, int j, int rj,
                             const std::vector<int>& a) {
    double prod = 1.0;
    for (int l = 1; l <= rj; ++l) prod *= oracle_seq_step(q, par, j, l, a);
    return prod;
}

double oracle_seq_pmf(const QMatrix& q, const SeqParams& par, int j, int rj,
                      const std::vector<int>& a) {
    const double stay = rj == q.ncat(j) ? 0.0 : oracle_seq_step(q, par, j, rj + 1, a);
    return oracle_seq_cumulative(q, par, j, rj, a) * (1.0 - stay);
}

double oracle_seq_prob(const QMatrix& q, const SeqParams& par, const std::vector<double>& p,
                       const std::vector<int>& r) {
    const auto profiles = enumerate_profiles(q.K);
    double total = 0.0;
    for (std::size_t a = 0; a < profiles.size(); ++a) {
        double prod = p[a];
        for (int j = 0; j < q.J(); ++j)
            prod *= oracle_seq_pmf(q, par, j, r[static_cast<std::size_t>(j)], profiles[a]);
        total += prod;
    }
    return total;
}

// ---------------------------------------------------------------------------
// random configuration generator
// ---------------------------------------------------------------------------

struct RandomConfig {
    QMatrix q;
    GpdinaParams gpar;
    SeqParams spar;
    std::vector<double> p;
};

RandomConfig random_config(std::mt19937_64& rng, ModelKind kind) {
    std::uniform_int_distribution<int> pick_j(1, 4);
    std::uniform_int_distribution<int> pick_k(1, 3);
    std::uniform_int_distribution<int> pick_h(1, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    RandomConfig cfg;
    cfg.q.kind = kind;
    cfg.q.K = pick_k(rng);
    const int J = pick_j(rng);
    std::uniform_int_distribution<int> pick_mask(0, (1 << cfg.q.K) - 1);
    for (int j = 0; j < J; ++j) {
        const int H = pick_h(rng);
        std::vector<std::uint32_t> cats;
        if (kind == ModelKind::Gpdina) {
            const std::uint32_t shared = static_cast<std::uint32_t>(pick_mask(rng));
            cats.assign(static_cast<std::size_t>(H), shared);
        } else {
            for (int l = 0; l < H; ++l) cats.push_back(static_cast<std::uint32_t>(pick_mask(rng)));
        }
        cfg.q.items.push_back(std::move(cats));
    }

    for (int j = 0; j < J; ++j) {
        const int H = cfg.q.ncat(j);
        std::vector<double> tp(static_cast<std::size_t>(H)), tm(static_cast<std::size_t>(H));
        // item-level branches: positive category masses with sum < 1
        double sp = 0.0, sm = 0.0;
        for (int l = 0; l < H; ++l) {
            tp[static_cast<std::size_t>(l)] = 0.05 + 0.9 * unit(rng);
            tm[static_cast<std::size_t>(l)] = 0.05 + 0.9 * unit(rng);
            sp += tp[static_cast<std::size_t>(l)];
            sm += tm[static_cast<std::size_t>(l)];
        }
        for (int l = 0; l < H; ++l) {
            tp[static_cast<std::size_t>(l)] *= 0.9 / std::max(1.0, sp);
            tm[static_cast<std::size_t>(l)] *= 0.9 / std::max(1.0, sm);
        }
        cfg.gpar.theta_plus.push_back(tp);
        cfg.gpar.theta_minus.push_back(tm);

        std::vector<double> bp(static_cast<std::size_t>(H)), bm(static_cast<std::size_t>(H));
        for (int l = 0; l < H; ++l) {
            bp[static_cast<std::size_t>(l)] = 0.55 + 0.4 * unit(rng);
            // one in four minus entries is an exact zero so the cascade runs
            bm[static_cast<std::size_t>(l)] = unit(rng) < 0.25 ? 0.0 : 0.05 + 0.4 * unit(rng);
        }
        cfg.spar.beta_plus.push_back(bp);
        cfg.spar.beta_minus.push_back(bm);
    }

    cfg.p.resize(num_profiles(cfg.q.K));
    double sum = 0.0;
    for (auto& v : cfg.p) {
        v = 0.1 + unit(rng);
        sum += v;
    }
    for (auto& v : cfg.p) v /= sum;
    return cfg;
}

// ---------------------------------------------------------------------------
// distribution agreement
// ---------------------------------------------------------------------------

TEST(OracleAgreement, ItemLevelDistributionsMatchBruteForce) {
    std::mt19937_64 rng(20250101);
    for (int trial = 0; trial < 100; ++trial) {
        const RandomConfig cfg = random_config(rng, ModelKind::Gpdina);
        const auto dist = gpdina_full_distribution(cfg.q, cfg.gpar, cfg.p);
        const PatternSpace sp = PatternSpace::of(cfg.q);
        std::vector<int> r(static_cast<std::size_t>(cfg.q.J()), 0);
        std::size_t idx = 0;
        double total = 0.0;
        do {
            const double want = oracle_gpdina_prob(cfg.q, cfg.gpar, cfg.p, r);
            ASSERT_NEAR(dist[idx], want, kAgreementTol) << "trial " << trial << " idx " << idx;
            total += want;
            ++idx;
        } while (sp.next(r));
        EXPECT_NEAR(total, 1.0, 1e-10) << "trial " << trial;
    }
}

TEST(OracleAgreement, SequentialDistributionsMatchBruteForce) {
    std::mt19937_64 rng(20250202);
    for (int trial = 0; trial < 100; ++trial) {
        const RandomConfig cfg = random_config(rng, ModelKind::Seq);
        const auto dist = seq_full_distribution(cfg.q, cfg.spar, cfg.p);
        const PatternSpace sp = PatternSpace::of(cfg.q);
        std::vector<int> r(static_cast<std::size_t>(cfg.q.J()), 0);
        std::size_t idx = 0;
        double total = 0.0;
        do {
            const double want = oracle_seq_prob(cfg.q, cfg.spar, cfg.p, r);
            ASSERT_NEAR(dist[idx], want, kAgreementTol) << "trial " << trial << " idx " << idx;
            total += want;
            ++idx;
        } while (sp.next(r));
        EXPECT_NEAR(total, 1.0, 1e-10) << "trial " << trial;
    }
}

TEST(OracleAgreement, MatrixEntriesMatchBruteForceProducts) {
    std::mt19937_64 rng(20250303);
    const auto profiles3 = enumerate_profiles(3);
    for (int trial = 0; trial < 30; ++trial) {
        {
            const RandomConfig cfg = random_config(rng, ModelKind::Gpdina);
            const TMatrix t = build_t_matrix(cfg.q, cfg.gpar);
            const auto profiles = enumerate_profiles(cfg.q.K);
            std::vector<int> r(static_cast<std::size_t>(cfg.q.J()), 0);
            do {
                const std::size_t row = t.patterns.index(r);
                for (std::size_t a = 0; a < profiles.size(); ++a) {
                    double want = 1.0;
                    for (int j = 0; j < cfg.q.J(); ++j)
                        if (r[static_cast<std::size_t>(j)] != 0)
                            want *= oracle_gpdina_pmf(cfg.q, cfg.gpar, j,
                                                      r[static_cast<std::size_t>(j)], profiles[a]);
                    ASSERT_NEAR(t.at(row, a), want, kAgreementTol);
                }
            } while (t.patterns.next(r));
        }
        {
            const RandomConfig cfg = random_config(rng, ModelKind::Seq);
            const TMatrix t = build_ts_matrix(cfg.q, cfg.spar);
            const auto profiles = enumerate_profiles(cfg.q.K);
            std::vector<int> r(static_cast<std::size_t>(cfg.q.J()), 0);
            do {
                const std::size_t row = t.patterns.index(r);
                for (std::size_t a = 0; a < profiles.size(); ++a) {
                    double want = 1.0;
                    for (int j = 0; j < cfg.q.J(); ++j)
                        if (r[static_cast<std::size_t>(j)] != 0)
                            want *= oracle_seq_cumulative(cfg.q, cfg.spar, j,
                                                          r[static_cast<std::size_t>(j)],
                                                          profiles[a]);
                    ASSERT_NEAR(t.at(row, a), want, kAgreementTol);
                }
            } while (t.patterns.next(r));
        }
    }
    (void)profiles3;
}

// ---------------------------------------------------------------------------
// Hadamard composition of matrix rows
//
// For patterns r, r' with disjoint supports (no item answered in both), the
// row of the merged pattern equals the elementwise product of the two rows.
// Verified exhaustively over all disjoint pairs for small configurations.
// ---------------------------------------------------------------------------

void check_hadamard_rows(const TMatrix& t, int J) {
    std::vector<int> r(static_cast<std::size_t>(J), 0);
    std::vector<std::vector<int>> all;
    do {
        all.push_back(r);
    } while (t.patterns.next(r));

    for (const auto& ra : all)
        for (const auto& rb : all) {
            bool disjoint = true;
            std::vector<int> merged(static_cast<std::size_t>(J));
            for (int j = 0; j < J; ++j) {
                if (ra[static_cast<std::size_t>(j)] != 0 && rb[static_cast<std::size_t>(j)] != 0)
                    disjoint = false;
                merged[static_cast<std::size_t>(j)] =
                    ra[static_cast<std::size_t>(j)] + rb[static_cast<std::size_t>(j)];
            }
            if (!disjoint) continue;
            const std::size_t ia = t.patterns.index(ra);
            const std::size_t ib = t.patterns.index(rb);
            const std::size_t im = t.patterns.index(merged);
            for (std::size_t a = 0; a < t.cols(); ++a)
                ASSERT_NEAR(t.at(im, a), t.at(ia, a) * t.at(ib, a), kAgreementTol);
        }
}

TEST(OracleAgreement, DisjointPatternRowsComposeByHadamardProduct) {
    std::mt19937_64 rng(20250404);
    for (int trial = 0; trial < 20; ++trial) {
        RandomConfig cfg = random_config(rng, ModelKind::Gpdina);
        while (cfg.q.J() > 3) cfg = random_config(rng, ModelKind::Gpdina);
        check_hadamard_rows(build_t_matrix(cfg.q, cfg.gpar), cfg.q.J());

        RandomConfig scfg = random_config(rng, ModelKind::Seq);
        while (scfg.q.J() > 3) scfg = random_config(rng, ModelKind::Seq);
        check_hadamard_rows(build_ts_matrix(scfg.q, scfg.spar), scfg.q.J());
    }
}

} // namespace
