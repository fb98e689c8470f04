#include <gtest/gtest.h>

#include "hkr/blowup.hpp"
#include "support/oracle.hpp"

using namespace hkr;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }
const Real kTol(q(1, 1000000000000L));
const PPoint kZero = PPoint::parse("L");

} // namespace

TEST(BlowupSiteTest, Examples) {
    const Scheme s(SchemeParams{});
    const auto s1 = make_site(s, kZero, 1);
    EXPECT_EQ(s1.h.exact(), q(3, 4));
    EXPECT_EQ(s1.u.lo.exact(), q(1, 4));
    EXPECT_EQ(s1.u.hi.exact(), q(3, 4));
    EXPECT_TRUE(s1.h.exact() <= q(3, 4) && q(3, 4) < 2 * s.u_length(1).exact());
    EXPECT_EQ(make_site(s, kZero, 2).h.exact(), q(3, 16));
    EXPECT_THROW(make_site(s, PPoint::parse("LR(L)"), 2), ValidationError);
    EXPECT_NO_THROW(make_site(s, PPoint::parse("LR(L)"), 3));
}

TEST(BlowupSiteTest, Geometry) {
    for (long r : {1L, 2L, 3L}) {
        const Scheme s(SchemeParams{q(r), 256, 64});
        for (int n = 1; n <= 30; ++n) {
            const auto site = make_site(s, kZero, n);
            EXPECT_EQ(site.h.exact(), s.residual_length(n).exact() + s.u_length(n).exact());
            EXPECT_LT(site.h.exact(), 2 * s.u_length(n).exact());
        }
        for (const char* text : {"LRL(LR)", "(LLR)", "RL(L)"}) {
            const PPoint p = PPoint::parse(text);
            for (int n = 1; n <= 20; ++n) {
                if (p.at(static_cast<std::size_t>(n - 1)) != Side::Left) continue;
                const auto site = make_site(s, p, n);
                EXPECT_TRUE(certainly_le(site.h, s.residual_length(n) + s.u_length(n)));
                EXPECT_TRUE(certainly_less(site.h, Real(2) * s.u_length(n)));
            }
        }
    }
}

TEST(BlowupQuantityTest, Examples) {
    const Scheme s(SchemeParams{});
    const CounterexampleF F(s);
    const auto s1 = make_site(s, kZero, 1);
    EXPECT_EQ(blowup_quantity(F, s1, 0, nullptr, kTol).exact(), q(244, 675));
    // Hand oracle for n = 1: 16/9 times the core-enumeration integral over [0, 3/4].
    const auto o = oracle::abs_power(1, 14, 0, q(3, 4), 1);
    EXPECT_TRUE(o.lo <= q(61, 300) && q(61, 300) <= o.hi);

    const auto s2 = make_site(s, kZero, 2);
    EXPECT_GT(blowup_quantity(F, s2, 0, nullptr, kTol).exact(), q(2, 9));
    EXPECT_EQ(blowup_lower_bound(s, 2).closed.exact(), q(2, 9));

    // [7/12, 3/4] is margin, so F vanishes and the slope term makes the integrand negative.
    BlowupSite flat = s1;
    flat.x = Real(q(7, 12));
    flat.h = Real(q(1, 6));
    EXPECT_EQ(blowup_quantity(F, flat, 10, nullptr, kTol).exact(), 0);
}

TEST(BlowupLowerBoundTest, Examples) {
    const Scheme s1(SchemeParams{}), s2(SchemeParams{q(2), 256, 64});
    EXPECT_EQ(blowup_lower_bound(s1, 1).closed.exact(), q(1, 6));
    EXPECT_EQ(blowup_lower_bound(s2, 1).closed.exact(), q(2, 63));
    // Oracle: repeated multiplication.
    Rational p = 1;
    for (int i = 0; i < 10; ++i) p *= q(4, 3);
    EXPECT_EQ(blowup_lower_bound(s1, 10).closed.exact(), p / 8);
    EXPECT_EQ(p / 8, q(131072, 59049));
}

TEST(BlowupLowerBoundTest, IdentityAndRatio) {
    for (long r : {1L, 2L, 3L}) {
        const Scheme s(SchemeParams{q(r), 256, 64});
        for (int n = 1; n <= 40; ++n) {
            const auto lb = blowup_lower_bound(s, n);
            EXPECT_TRUE(lb.equal_certified);
            EXPECT_EQ(lb.closed.exact(), lb.intermediate.exact());
            if (n > 1) {
                EXPECT_EQ(lb.closed.exact() / blowup_lower_bound(s, n - 1).closed.exact(), pow_int(q(4, 3), r));
            }
        }
    }
}

TEST(DivergenceReportTest, ZeroSiteAllRowsCertified) {
    const Scheme s(SchemeParams{});
    const CounterexampleF F(s);
    const auto rep = divergence_report(F, kZero, 0, nullptr, 2, 20, kTol);
    ASSERT_EQ(rep.rows.size(), 19u);
    for (const auto& row : rep.rows) {
        EXPECT_TRUE(row.certified) << row.n;
        EXPECT_GT(row.quantity.exact(), pow_int(q(4, 3), row.n) / 8);
    }
    EXPECT_EQ(rep.verdict, BlowupVerdict::Diverges);
}

TEST(DivergenceReportTest, Thresholds) {
    const Scheme s(SchemeParams{});
    const CounterexampleF F(s);
    const auto rep = divergence_report(F, kZero, 5, nullptr, 1, 12, kTol);
    ASSERT_FALSE(rep.rows.empty());
    EXPECT_EQ(rep.rows.front().n, 7);
    for (const auto& row : rep.rows) EXPECT_TRUE(row.certified) << row.n;
    EXPECT_EQ(rep.verdict, BlowupVerdict::Diverges);

    const MonotoneStep R({q(1, 3), q(2, 3)}, {q(0), q(1), q(3)});
    const auto rep2 = divergence_report(F, kZero, 0, &R, 1, 12, kTol);
    EXPECT_EQ(rep2.rows.front().n, 5);
    EXPECT_EQ(rep2.verdict, BlowupVerdict::Diverges);
}

TEST(DivergenceReportTest, MonotoneRobustness) {
    // For nondecreasing R and n above the threshold the integrand exceeds 1 on v_n.
    const Scheme s(SchemeParams{});
    const CounterexampleF F(s);
    const MonotoneStep R({q(1, 1000), q(1, 100), q(1, 10)}, {q(0), q(1, 2), q(3, 2), q(2)});
    for (long alpha : {-4L, 0L, 3L}) {
        const auto rep = divergence_report(F, PPoint::parse("(L)"), q(alpha), &R, 1, 15, kTol);
        for (const auto& row : rep.rows) {
            EXPECT_TRUE(certainly_greater(row.pointwise_min, Real(1))) << alpha << " " << row.n;
            EXPECT_TRUE(row.certified);
        }
    }
}
