#include <gtest/gtest.h>

#include <random>

#include "hkr/scheme.hpp"

using namespace hkr;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }

Scheme scheme(long r, int cap = 64) { return Scheme(SchemeParams{q(r), 256, cap}); }

} // namespace

TEST(SchemeLengths, Examples) {
    const auto s1 = scheme(1), s2 = scheme(2);
    EXPECT_EQ(s1.u_length(1).exact(), q(1, 2));
    EXPECT_EQ(s1.u_length(2).exact(), q(1, 8));
    EXPECT_EQ(s2.u_length(1).exact(), q(7, 8));
    EXPECT_EQ(s1.v_length(1).exact(), q(1, 6));
    EXPECT_EQ(s1.v_length(2).exact(), q(1, 72));
    EXPECT_EQ(s2.v_length(1).exact(), q(7, 72));
    EXPECT_EQ(s1.residual_length(0).exact(), q(1));
    EXPECT_EQ(s1.residual_length(1).exact(), q(1, 4));
    EXPECT_EQ(s1.residual_length(2).exact(), q(1, 16));
    EXPECT_EQ(s2.residual_length(3).exact(), q(1, 4096));
    EXPECT_THROW(s1.u_length(0), DomainError);
    EXPECT_THROW(s1.v_length(0), DomainError);
    EXPECT_THROW(s1.u_length(200), DepthError);
}

TEST(SchemeLengths, NonIntegerRIsEnclosed) {
    const Scheme s(SchemeParams{q(3, 2), 256, 20});
    EXPECT_FALSE(s.exact_mode());
    // u_1 = (4^1.5 - 2) / 4^1.5 = 6/8.
    EXPECT_TRUE(s.u_length(1).lower() <= q(3, 4) && q(3, 4) <= s.u_length(1).upper());
    EXPECT_TRUE(s.residual_length(2).lower() <= q(1, 64) && q(1, 64) <= s.residual_length(2).upper());
}

TEST(SchemeSegments, ResidualAndRemoved) {
    const auto s = scheme(1);
    auto root = s.residual_segment(DescentPath());
    EXPECT_EQ(root.lo.exact(), q(0));
    EXPECT_EQ(root.hi.exact(), q(1));
    auto l = s.residual_segment(DescentPath::parse("L"));
    EXPECT_EQ(l.lo.exact(), q(0));
    EXPECT_EQ(l.hi.exact(), q(1, 4));
    auto lr = s.residual_segment(DescentPath::parse("LR"));
    EXPECT_EQ(lr.lo.exact(), q(3, 16));
    EXPECT_EQ(lr.hi.exact(), q(1, 4));
    EXPECT_EQ(lr.rank, 2);

    auto u1 = s.removed_interval(DescentPath());
    EXPECT_EQ(u1.lo.exact(), q(1, 4));
    EXPECT_EQ(u1.hi.exact(), q(3, 4));
    EXPECT_EQ(u1.core.lo.exact(), q(5, 12));
    EXPECT_EQ(u1.core.hi.exact(), q(7, 12));

    auto u2 = s.removed_interval(DescentPath::parse("L"));
    EXPECT_EQ(u2.lo.exact(), q(1, 16));
    EXPECT_EQ(u2.hi.exact(), q(3, 16));
    EXPECT_EQ(u2.core.hi.exact() - u2.core.lo.exact(), q(1, 72));
    EXPECT_EQ(u2.core.lo.exact() + u2.core.hi.exact(), q(1, 4));  // concentric about 1/8

    EXPECT_EQ(scheme(2).removed_interval(DescentPath()).lo.exact(), q(1, 16));
    EXPECT_EQ(scheme(2).removed_interval(DescentPath()).hi.exact(), q(15, 16));

    const auto small = scheme(1, 3);
    EXPECT_THROW(small.residual_segment(DescentPath::parse("LLLL")), DepthError);
    EXPECT_THROW(small.removed_interval(DescentPath::parse("LLL")), DepthError);
}

TEST(SchemeLocate, Examples) {
    const auto s = scheme(1);
    auto a = s.locate(Real(q(1, 2)), 64);
    EXPECT_EQ(a.kind, Location::Kind::InCore);
    EXPECT_EQ(a.rank, 1);
    EXPECT_EQ(s.locate(Real(0), 64).kind, Location::Kind::InPCertified);
    auto c = s.locate(Real(q(3, 10)), 64);
    EXPECT_EQ(c.kind, Location::Kind::InMarginOfRemoved);
    EXPECT_EQ(c.rank, 1);
    EXPECT_EQ(c.side, Side::Left);
    EXPECT_EQ(s.locate(Real(q(1, 4)), 64).kind, Location::Kind::InPCertified);
    // Core endpoints belong to the margin (cores are open).
    EXPECT_EQ(s.locate(Real(q(5, 12)), 64).kind, Location::Kind::InMarginOfRemoved);
    EXPECT_THROW(s.locate(Real(q(3, 2)), 64), DomainError);
    EXPECT_THROW(s.locate(Real(-1), 64), DomainError);
}

TEST(SchemeLocate, NonEndpointPointOfPIsUndecided) {
    const auto s = scheme(1);
    const PPoint p = PPoint::parse("LR");
    auto loc = s.locate(s.point(p), 30);
    EXPECT_EQ(loc.kind, Location::Kind::UndecidedAtDepth);
    EXPECT_EQ(loc.rank, 30);
    EXPECT_EQ(loc.path, p.path_prefix(30));
}

TEST(SchemeInvariants, ResidualRecurrenceAndOrdering) {
    for (long r : {1L, 2L, 3L}) {
        const auto s = scheme(r, 61);
        for (int n = 1; n <= 60; ++n) {
            const Rational rn = s.residual_length(n).exact();
            const Rational un = s.u_length(n).exact();
            EXPECT_EQ(rn, (s.residual_length(n - 1).exact() - un) / 2);
            EXPECT_EQ(rn, un / (s.four_r().exact() - 2));
            EXPECT_LT(rn, un);
        }
    }
}

TEST(SchemeInvariants, NullsetPartialSums) {
    for (long r : {1L, 2L, 3L}) {
        const auto s = scheme(r, 41);
        const Rational ratio = q(2) / s.four_r().exact();
        Rational removed = 0, prev = 1;
        for (int n = 1; n <= 40; ++n) {
            const Rational remaining = pow_int(q(2), n) * s.residual_length(n).exact();
            EXPECT_EQ(remaining, pow_int(ratio, n));
            EXPECT_GT(remaining, 0);
            EXPECT_LT(remaining, prev);
            prev = remaining;
            removed += pow_int(q(2), n - 1) * s.u_length(n).exact();
            EXPECT_EQ(removed + remaining, 1);
        }
    }
}

TEST(SchemeInvariants, GeometryOfRandomPaths) {
    std::mt19937_64 rng(21);
    for (long r : {1L, 2L}) {
        const auto s = scheme(r);
        for (int trial = 0; trial < 300; ++trial) {
            const int len = static_cast<int>(rng() % 30);
            std::string text;
            for (int i = 0; i < len; ++i) text.push_back(rng() % 2 ? 'L' : 'R');
            const auto path = DescentPath::parse(text);
            const auto parent = s.residual_segment(path);
            const auto removed = s.removed_interval(path);
            const auto left = s.child(parent, Side::Left), right = s.child(parent, Side::Right);
            const int n = len + 1;
            EXPECT_LT(s.v_length(n).exact(), s.u_length(n).exact());
            EXPECT_LT(s.u_length(n).exact(), s.residual_length(n - 1).exact());
            EXPECT_LT(parent.lo.exact(), removed.lo.exact());
            EXPECT_LT(removed.hi.exact(), parent.hi.exact());
            EXPECT_EQ(left.hi.exact(), removed.lo.exact());
            EXPECT_EQ(right.lo.exact(), removed.hi.exact());
            EXPECT_LT(removed.lo.exact(), removed.core.lo.exact());
            EXPECT_LT(removed.core.hi.exact(), removed.hi.exact());
            EXPECT_EQ(removed.core.lo.exact() - removed.lo.exact(), removed.hi.exact() - removed.core.hi.exact());
        }
    }
}

TEST(SchemeInvariants, LocateAgreesWithGeometry) {
    std::mt19937_64 rng(9);
    const auto s = scheme(1);
    int cores = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const Rational x = q(static_cast<long>(rng() % 1000001), 1000000);
        const auto loc = s.locate(Real(x), 64);
        if (loc.kind == Location::Kind::InCore) {
            ++cores;
            const auto J = s.removed_interval(loc.path);
            EXPECT_EQ(J.rank, loc.rank);
            EXPECT_LT(J.core.lo.exact(), x);
            EXPECT_LT(x, J.core.hi.exact());
        } else if (loc.kind == Location::Kind::InMarginOfRemoved) {
            const auto J = s.removed_interval(loc.path);
            EXPECT_LT(J.lo.exact(), x);
            EXPECT_LT(x, J.hi.exact());
            EXPECT_TRUE(x <= J.core.lo.exact() || x >= J.core.hi.exact());
        }
    }
    EXPECT_GT(cores, 100);
}

TEST(SchemePoints, PeriodicAddresses) {
    const auto s = scheme(1);
    EXPECT_EQ(s.point(PPoint::parse("L")).exact(), q(0));
    EXPECT_EQ(s.point(PPoint::parse("R")).exact(), q(1));
    EXPECT_EQ(s.point(PPoint::right_endpoint(DescentPath::parse("L"))).exact(), q(1, 4));
    EXPECT_EQ(s.point(PPoint::left_endpoint(DescentPath::parse("LR"))).exact(), q(3, 16));
    // Oracle: the point lies in every residual segment along its address.
    for (const char* text : {"LR", "RRL", "LL(RL)", "R(LLR)"}) {
        const auto p = PPoint::parse(text);
        const Rational x = s.point(p).exact();
        for (int depth : {1, 5, 20, 40}) {
            const auto seg = s.residual_segment(p.path_prefix(static_cast<std::size_t>(depth)));
            EXPECT_LE(seg.lo.exact(), x) << text;
            EXPECT_LE(x, seg.hi.exact()) << text;
        }
    }
    EXPECT_THROW(PPoint::parse("LX"), ValidationError);
    EXPECT_THROW(PPoint::parse("L()"), ValidationError);
}
