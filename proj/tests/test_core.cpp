// Tests for the shared primitives: profiles, Q-matrix parsing, category
// pruning, proportion validation, the response-pattern space, and CSV I/O.

#include <gtest/gtest.h>

#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "polydina/core.hpp"
#include "polydina/error.hpp"

namespace {

using namespace polydina;

Errc code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::ok;
}

// ---------------------------------------------------------------------------
// profiles
// ---------------------------------------------------------------------------

TEST(Profiles, CanonicalOrderPutsFirstAttributeInLowBit) {
    const auto profs = enumerate_profiles(2);
    ASSERT_EQ(profs.size(), 4u);
    EXPECT_EQ(profs[0], (std::vector<int>{0, 0}));
    EXPECT_EQ(profs[1], (std::vector<int>{1, 0}));
    EXPECT_EQ(profs[2], (std::vector<int>{0, 1}));
    EXPECT_EQ(profs[3], (std::vector<int>{1, 1}));
}

TEST(Profiles, IndexInvertsEnumeration) {
    for (int K = 1; K <= 5; ++K) {
        const auto profs = enumerate_profiles(K);
        for (std::size_t a = 0; a < profs.size(); ++a)
            EXPECT_EQ(profile_index(profs[a]), a) << "K=" << K;
    }
}

TEST(Profiles, EnumerationRejectsBadK) {
    EXPECT_EQ(code_of([] { enumerate_profiles(0); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { enumerate_profiles(kMaxAttributes + 1); }), Errc::invalid_argument);
}

TEST(Profiles, IndexRejectsNonBinaryEntries) {
    const std::vector<int> bad{0, 2};
    EXPECT_EQ(code_of([&] { profile_index(bad); }), Errc::invalid_argument);
}

TEST(IdealResponse, RequiresEveryMaskedAttribute) {
    const std::vector<int> q{1, 0, 1};
    EXPECT_EQ(ideal_response(q, std::vector<int>{1, 0, 1}), 1);
    EXPECT_EQ(ideal_response(q, std::vector<int>{1, 1, 1}), 1);
    EXPECT_EQ(ideal_response(q, std::vector<int>{1, 1, 0}), 0);
    EXPECT_EQ(ideal_response(q, std::vector<int>{0, 0, 1}), 0);
}

TEST(IdealResponse, ZeroMaskAcceptsEveryProfile) {
    const std::vector<int> q{0, 0};
    EXPECT_EQ(ideal_response(q, std::vector<int>{0, 0}), 1);
    EXPECT_EQ(ideal_response(q, std::vector<int>{1, 1}), 1);
}

TEST(IdealResponse, RejectsLengthMismatchAndBadEntries) {
    const std::vector<int> q{1, 0};
    EXPECT_EQ(code_of([&] { ideal_response(q, std::vector<int>{1}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { ideal_response(q, std::vector<int>{1, 3}); }), Errc::invalid_argument);
}

TEST(MaskDominates, MatchesBitwiseContainment) {
    EXPECT_TRUE(mask_dominates(0b11, 0b01));
    EXPECT_TRUE(mask_dominates(0b11, 0b11));
    EXPECT_FALSE(mask_dominates(0b01, 0b11));
    EXPECT_TRUE(mask_dominates(0b00, 0b00));
}

// ---------------------------------------------------------------------------
// Q-matrix parsing
// ---------------------------------------------------------------------------

TEST(QParse, BareLayoutOneRowPerBinaryItem) {
    const QMatrix q = parse_q_matrix("1,0\n0,1\n", ModelKind::Gpdina);
    EXPECT_EQ(q.K, 2);
    EXPECT_EQ(q.J(), 2);
    EXPECT_EQ(q.ncat(0), 1);
    EXPECT_EQ(q.row_mask(1, 1), 0b10u);
}

TEST(QParse, PrefixedSeqLayoutGroupsCategories) {
    const std::string csv =
        "# item,category,q1,q2\n"
        "1,1,1,0\n"
        "1,2,1,1\n"
        "2,1,0,1\n";
    const QMatrix q = parse_q_matrix(csv, ModelKind::Seq);
    EXPECT_EQ(q.K, 2);
    EXPECT_EQ(q.J(), 2);
    EXPECT_EQ(q.ncat(0), 2);
    EXPECT_EQ(q.ncat(1), 1);
    EXPECT_EQ(q.row_mask(0, 2), 0b11u);
    EXPECT_EQ(q.row_mask(1, 1), 0b10u);
    EXPECT_EQ(q.row_bits(0, 1), (std::vector<int>{1, 0}));
}

TEST(QParse, PrefixedGpdinaLayoutSecondColumnIsCategoryCount) {
    const std::string csv =
        "1,3,1,0\n"
        "2,1,0,1\n";
    const QMatrix q = parse_q_matrix(csv, ModelKind::Gpdina);
    EXPECT_EQ(q.J(), 2);
    EXPECT_EQ(q.ncat(0), 3);
    EXPECT_EQ(q.row_mask(0, 1), 0b01u);
    EXPECT_EQ(q.row_mask(0, 3), 0b01u);
    EXPECT_EQ(q.ncat(1), 1);
}

TEST(QParse, GpdinaAcceptsPerCategoryLayoutWhenRowsAgree) {
    const std::string csv =
        "1,1,1,0\n"
        "1,2,1,0\n"
        "2,1,0,1\n";
    const QMatrix q = parse_q_matrix(csv, ModelKind::Gpdina);
    EXPECT_EQ(q.J(), 2);
    EXPECT_EQ(q.ncat(0), 2);
    EXPECT_EQ(q.row_mask(0, 2), 0b01u);
}

TEST(QParse, GpdinaRejectsDisagreeingCategoryRows) {
    const std::string csv =
        "1,1,1,0\n"
        "1,2,1,1\n";
    EXPECT_EQ(code_of([&] { parse_q_matrix(csv, ModelKind::Gpdina); }), Errc::parse);
}

TEST(QParse, SkipsCommentsAndBlankLines) {
    const std::string csv =
        "# a comment\n"
        "\n"
        "1,1\n"
        "   \n"
        "# another\n"
        "0,1\n";
    const QMatrix q = parse_q_matrix(csv, ModelKind::Seq);
    EXPECT_EQ(q.J(), 2);
    EXPECT_EQ(q.row_mask(0, 1), 0b11u);
}

TEST(QParse, RejectsRaggedAndEmptyInput) {
    EXPECT_EQ(code_of([] { parse_q_matrix("1,0\n0,1,1\n", ModelKind::Seq); }), Errc::parse);
    EXPECT_EQ(code_of([] { parse_q_matrix("# only comments\n", ModelKind::Seq); }), Errc::parse);
    EXPECT_EQ(code_of([] { parse_q_matrix("1,x\n", ModelKind::Seq); }), Errc::parse);
}

TEST(QParse, PrefixedReadingWinsWhenBothLayoutsApply) {
    // Three binary columns: as prefixed this is item 1, category 1, q = (1);
    // as bare it would be one item with q = (1,1,1). Prefixed wins.
    const QMatrix q = parse_q_matrix("1,1,1\n", ModelKind::Seq);
    EXPECT_EQ(q.K, 1);
    EXPECT_EQ(q.J(), 1);
    EXPECT_EQ(q.row_mask(0, 1), 0b1u);
}

TEST(QParse, RoundTripsThroughCsvWriter) {
    const std::string csv =
        "1,1,1,0,0\n"
        "1,2,1,1,0\n"
        "2,1,0,0,1\n";
    const QMatrix q = parse_q_matrix(csv, ModelKind::Seq);
    const QMatrix again = parse_q_matrix(q_matrix_to_csv(q), ModelKind::Seq);
    EXPECT_EQ(again.items, q.items);
    const QMatrix g = parse_q_matrix("1,2,1,0\n2,1,0,1\n", ModelKind::Gpdina);
    const QMatrix g2 = parse_q_matrix(q_matrix_to_csv(g), ModelKind::Gpdina);
    EXPECT_EQ(g2.items, g.items);
}

TEST(QValidate, RejectsStructuralDefects) {
    QMatrix q;
    q.kind = ModelKind::Seq;
    q.K = 2;
    EXPECT_EQ(code_of([&] { q.validate(); }), Errc::invalid_argument); // no items
    q.items = {{0b100u}};                                              // attribute 3 with K=2
    EXPECT_EQ(code_of([&] { q.validate(); }), Errc::invalid_argument);
    q.items = {{}};
    EXPECT_EQ(code_of([&] { q.validate(); }), Errc::invalid_argument); // empty item
    q.items = {{0b01u, 0b11u}};
    EXPECT_EQ(code_of([&] { q.validate(); }), Errc::ok);
    q.kind = ModelKind::Gpdina; // shared-row invariant now fails
    EXPECT_EQ(code_of([&] { q.validate(); }), Errc::invalid_argument);
}

TEST(QMatrixApi, UnrestrictedDetectsSharedRows) {
    QMatrix q;
    q.kind = ModelKind::Seq;
    q.K = 2;
    q.items = {{0b01u, 0b01u}, {0b10u}};
    EXPECT_TRUE(q.is_unrestricted());
    q.items[0][1] = 0b11u;
    EXPECT_FALSE(q.is_unrestricted());
}

// ---------------------------------------------------------------------------
// pruning
// ---------------------------------------------------------------------------

TEST(Prune, RemovesZeroRowsRenumbersAndRecordsOrigin) {
    QMatrix q;
    q.kind = ModelKind::Seq;
    q.K = 2;
    q.items = {{0b00u, 0b01u},  // category 1 zero
               {0b00u},         // entire item vanishes
               {0b10u, 0b00u}}; // category 2 zero
    const PruneResult res = prune_zero_categories(q);
    EXPECT_EQ(res.q.J(), 2);
    EXPECT_EQ(res.q.items[0], (std::vector<std::uint32_t>{0b01u}));
    EXPECT_EQ(res.q.items[1], (std::vector<std::uint32_t>{0b10u}));
    EXPECT_EQ(res.kept_items, (std::vector<int>{1, 3}));
    ASSERT_EQ(res.removed.size(), 3u);
    EXPECT_EQ(res.removed[0], (PrunedEntry{1, 1}));
    EXPECT_EQ(res.removed[1], (PrunedEntry{2, 1}));
    EXPECT_EQ(res.removed[2], (PrunedEntry{3, 2}));
}

TEST(Prune, NoZeroRowsIsIdentity) {
    QMatrix q;
    q.kind = ModelKind::Gpdina;
    q.K = 1;
    q.items = {{0b1u, 0b1u}, {0b1u}};
    const PruneResult res = prune_zero_categories(q);
    EXPECT_TRUE(res.removed.empty());
    EXPECT_EQ(res.q.items, q.items);
    EXPECT_EQ(res.kept_items, (std::vector<int>{1, 2}));
}

// ---------------------------------------------------------------------------
// proportions
// ---------------------------------------------------------------------------

TEST(Proportions, AcceptsValidRejectsInvalid) {
    const std::vector<double> ok{0.25, 0.25, 0.25, 0.25};
    EXPECT_EQ(code_of([&] { validate_proportions(ok, 2); }), Errc::ok);
    const std::vector<double> short_p{0.5, 0.5};
    EXPECT_EQ(code_of([&] { validate_proportions(short_p, 2); }), Errc::invalid_argument);
    const std::vector<double> zero{0.0, 1.0};
    EXPECT_EQ(code_of([&] { validate_proportions(zero, 1); }), Errc::invalid_argument);
    const std::vector<double> off{0.25, 0.25, 0.25, 0.25 + 1e-9};
    EXPECT_EQ(code_of([&] { validate_proportions(off, 2); }), Errc::invalid_argument);
}

// ---------------------------------------------------------------------------
// pattern space
// ---------------------------------------------------------------------------

TEST(PatternSpace, SizeIsProductOfCategoryCountsPlusOne) {
    const PatternSpace sp({2, 1, 3});
    EXPECT_EQ(sp.size(), 3u * 2u * 4u);
    EXPECT_EQ(sp.J(), 3);
    EXPECT_EQ(sp.ncat(2), 3);
}

TEST(PatternSpace, LastItemVariesFastest) {
    const PatternSpace sp({1, 2});
    EXPECT_EQ(sp.index(std::vector<int>{0, 0}), 0u);
    EXPECT_EQ(sp.index(std::vector<int>{0, 1}), 1u);
    EXPECT_EQ(sp.index(std::vector<int>{0, 2}), 2u);
    EXPECT_EQ(sp.index(std::vector<int>{1, 0}), 3u);
    EXPECT_EQ(sp.index(std::vector<int>{1, 2}), 5u);
}

TEST(PatternSpace, OdometerAgreesWithIndexAndPattern) {
    const PatternSpace sp({2, 1, 2});
    std::vector<int> r(3, 0);
    std::size_t idx = 0;
    do {
        EXPECT_EQ(sp.index(r), idx);
        EXPECT_EQ(sp.pattern(idx), r);
        ++idx;
    } while (sp.next(r));
    EXPECT_EQ(idx, sp.size());
    EXPECT_EQ(r, (std::vector<int>(3, 0))); // odometer wraps to all zeros
}

TEST(PatternSpace, RejectsOutOfBoundsAccess) {
    const PatternSpace sp({2});
    EXPECT_EQ(code_of([&] { sp.index(std::vector<int>{3}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { sp.index(std::vector<int>{-1}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { sp.index(std::vector<int>{0, 0}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([&] { (void)sp.pattern(3); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { PatternSpace({}); }), Errc::invalid_argument);
    EXPECT_EQ(code_of([] { PatternSpace({0}); }), Errc::invalid_argument);
}

// ---------------------------------------------------------------------------
// matrix cap and CSV rendering
// ---------------------------------------------------------------------------

TEST(MatrixCap, EnvironmentOverridesDefault) {
    ::unsetenv("POLYDINA_MATRIX_CAP");
    EXPECT_EQ(matrix_entry_cap(), kDefaultMatrixEntryCap);
    ::setenv("POLYDINA_MATRIX_CAP", "12345", 1);
    EXPECT_EQ(matrix_entry_cap(), 12345u);
    ::setenv("POLYDINA_MATRIX_CAP", "not-a-number", 1);
    EXPECT_EQ(matrix_entry_cap(), kDefaultMatrixEntryCap);
    ::unsetenv("POLYDINA_MATRIX_CAP");
}

TEST(TMatrixCsv, HeaderListsProfilesAndRowsListPatterns) {
    TMatrix t{PatternSpace({1, 1}), 1, {}};
    t.data.assign(t.rows() * t.cols(), 0.0);
    t.at(0, 0) = 1.0;
    t.at(3, 1) = 0.25;
    const std::string csv = t.to_csv();
    EXPECT_NE(csv.find("pattern,a0,a1\n"), std::string::npos);
    EXPECT_NE(csv.find("0-0,1,0\n"), std::string::npos);
    EXPECT_NE(csv.find("1-1,0,0.25\n"), std::string::npos);
}

// ---------------------------------------------------------------------------
// response tables
// ---------------------------------------------------------------------------

TEST(ResponseCsv, ParsesWithinCategoryBounds) {
    QMatrix q;
    q.kind = ModelKind::Seq;
    q.K = 1;
    q.items = {{0b1u, 0b1u}, {0b1u}};
    const auto data = parse_response_csv("0,1\n2,0\n# note\n1,1\n", q);
    ASSERT_EQ(data.size(), 3u);
    EXPECT_EQ(data[1], (std::vector<int>{2, 0}));
    EXPECT_EQ(code_of([&] { parse_response_csv("3,0\n", q); }), Errc::parse);
    EXPECT_EQ(code_of([&] { parse_response_csv("0,0,0\n", q); }), Errc::parse);
    EXPECT_EQ(code_of([&] { parse_response_csv("0,-1\n", q); }), Errc::parse);
}

TEST(ResponseCsv, WriterRoundTrips) {
    QMatrix q;
    q.kind = ModelKind::Seq;
    q.K = 1;
    q.items = {{0b1u}, {0b1u, 0b1u}};
    const std::vector<std::vector<int>> data{{1, 2}, {0, 0}};
    EXPECT_EQ(parse_response_csv(response_table_to_csv(data), q), data);
}

} // namespace
