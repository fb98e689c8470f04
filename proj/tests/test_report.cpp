#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "hkr/report.hpp"
#include "support/oracle.hpp"

using namespace hkr;

namespace {

Rational q(long p, long d = 1) { return make_rational(p, d); }
const Real kTol(parse_rational("1e-32"));

} // namespace

TEST(JsonTest, Scalars) {
    EXPECT_EQ(io::to_json(Real(q(6, 25))), "6/25");
    EXPECT_EQ(io::to_json(Real(q(4))), "4/1");
    const Real enc = Real::between(Real(q(1, 3)), Real(q(1, 2)));
    const auto j = io::to_json(enc);
    ASSERT_TRUE(j.is_object());
    const Real back = io::real_from_json(j);
    EXPECT_TRUE(back.lower() <= q(1, 3) && q(1, 2) <= back.upper());
    EXPECT_EQ(io::real_from_json("-3/6").exact(), q(-1, 2));
    EXPECT_EQ(io::to_json(std::optional<Real>()), "divergent");
    EXPECT_THROW(io::real_from_json(io::Json::array()), ValidationError);
}

TEST(JsonTest, MonotoneStep) {
    std::istringstream in(R"({"breakpoints": ["1/2", "3/4"], "values": ["0", "1/3", 3]})");
    const MonotoneStep R = io::read_monotone_step(in);
    EXPECT_EQ(R.total_variation(), 3);
    EXPECT_EQ(R(q(5, 8)), q(1, 3));
    EXPECT_EQ(io::to_json(R).dump(), R"({"breakpoints":["1/2","3/4"],"values":["0/1","1/3","3/1"]})");

    std::istringstream bad(R"({"breakpoints": ["1/2"], "values": ["2", "1"]})");
    EXPECT_THROW(io::read_monotone_step(bad), ValidationError);
    std::istringstream malformed(R"({"breakpoints": ["1/2"])");
    EXPECT_THROW(io::read_monotone_step(malformed), ValidationError);
    std::istringstream missing(R"({"values": ["1"]})");
    EXPECT_THROW(io::read_monotone_step(missing), ValidationError);
}

TEST(JsonTest, CollectionsRoundTrip) {
    const Scheme s(SchemeParams{});
    std::istringstream in(
        "{\"interval\": [\"1/4\", \"3/4\"], \"tag_path\": \"L\", \"tag_kind\": \"right_endpoint\"}\n"
        "\n"
        "{\"interval\": [\"0\", \"1/100\"], \"tag_path\": \"LR(RL)\", \"tag_kind\": \"limit\"}\n");
    const TaggedCollection coll = io::read_collection(in);
    ASSERT_EQ(coll.size(), 2u);
    EXPECT_EQ(coll[1].tag.str(), "LR(RL)");
    std::ostringstream out;
    io::write_collection(out, coll);
    std::istringstream again(out.str());
    const TaggedCollection back = io::read_collection(again);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[0].c.exact(), q(1, 4));
    EXPECT_EQ(back[0].kind(), TagKind::RightEndpoint);
    EXPECT_EQ(back[1].tag_path(), "LR(RL)");

    std::istringstream bad("{\"interval\": [\"1/4\"], \"tag_path\": \"L\", \"tag_kind\": \"limit\"}\n");
    EXPECT_THROW(io::read_collection(bad), ValidationError);
    std::istringstream kind("{\"interval\": [\"0\", \"1\"], \"tag_path\": \"L\", \"tag_kind\": \"inner\"}\n");
    EXPECT_THROW(io::read_collection(kind), ValidationError);
}

TEST(JsonTest, ChainReportFields) {
    const Scheme s(SchemeParams{});
    const CounterexampleF F(s);
    const RemovedInterval J = s.removed_interval(DescentPath::parse("LRLR"));
    const TaggedCollection coll{{J.lo, J.core.hi, PPoint::right_endpoint(DescentPath::parse("LRLRL"))}};
    const auto j = io::to_json(chain_verify(F, coll, 4, 1, Real(q(1, 1000000))));
    for (const char* key : {"lhs", "middle1", "middle2", "closed_bound", "checks", "pairs", "segments", "ranks"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_TRUE(j["certified"].get<bool>());
    EXPECT_EQ(j["pairs"].size(), 1u);
    EXPECT_EQ(j["pairs"][0]["k"], 5);
}

TEST(CsvTest, Columns) {
    const Scheme s(SchemeParams{});
    const CounterexampleF F(s);
    const auto rep = divergence_report(F, PPoint::parse("(L)"), 0, nullptr, 1, 4, Real(q(1, 1000000)));
    std::ostringstream out;
    io::write_csv(out, rep);
    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    EXPECT_EQ(header, "n,h_n,quantity_lower,quantity_upper,v_n_over_hn2,closed_bound,certified");
    std::getline(lines, row);
    EXPECT_EQ(row.substr(0, 2), "2,");
    EXPECT_EQ(row.substr(row.size() - 4), "true");

    const auto G = ProbeFunction::counterexample(F);
    const auto series = decay_scan(G, Real(0), 0, 1, construction_schedule(s, 2, 8), 1, Real(q(1, 1000000)), Real(0));
    std::ostringstream d;
    io::write_csv(d, series);
    const std::string text = d.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "h,lower,upper,quotient_lower,quotient_upper");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
}

TEST(NullsetTest, RemainingMeasureAndSeries) {
    for (long r : {1L, 2L, 3L}) {
        const Scheme s(SchemeParams{q(r), 256, 64});
        const NullsetReport rep = nullset_report(s, 40, kTol);
        EXPECT_TRUE(rep.certified) << r;
        const Rational ratio = q(2) / oracle::qpow(4, r);
        for (const auto& row : rep.rows) EXPECT_EQ(row.remaining.exact(), pow_int(ratio, row.n));
        EXPECT_LE(rep.series.width(), parse_rational("1e-30"));
        EXPECT_EQ(rep.closed.exact(), 1 / (oracle::qpow(4, r) - 2));
    }
    const Scheme s1(SchemeParams{});
    EXPECT_EQ(nullset_report(s1, 10, kTol).rows[10].remaining.exact(), q(1, 1024));
    const Scheme s2(SchemeParams{q(2), 256, 64});
    EXPECT_EQ(nullset_report(s2, 5, kTol).rows[5].remaining.exact(), q(1, 32768));
    const Scheme half(SchemeParams{q(3, 2), 256, 64});
    EXPECT_TRUE(nullset_report(half, 30, Real(parse_rational("1e-20"))).certified);
}

TEST(NormTest, TwoComputations) {
    const Scheme s1(SchemeParams{});
    const NormReport r1 = norm_report(CounterexampleF(s1), kTol);
    EXPECT_TRUE(r1.certified);
    EXPECT_EQ(r1.direct.exact(), q(6, 25));
    EXPECT_EQ(r1.series.exact(), q(6, 25));
    // Brute-force partial sums of (4 - 2)/2 * sum_k k (1/6)^k.
    mpq_class partial = 0, p = 1;
    for (int k = 1; k <= 60; ++k) {
        p /= 6;
        partial += k * p;
    }
    EXPECT_LT(abs(partial - mpq_class(6, 25)), mpq_class(1, 1000000000000L));

    const Scheme s2(SchemeParams{q(2), 256, 64});
    const NormReport r2 = norm_report(CounterexampleF(s2), kTol);
    EXPECT_TRUE(r2.certified);
    const auto o = oracle::abs_power(2, 10, 0, 1, 2);
    EXPECT_TRUE(o.lo <= r2.direct.exact() && r2.direct.exact() <= o.hi);

    const Scheme s3(SchemeParams{q(3, 2), 256, 64});
    const NormReport r3 = norm_report(CounterexampleF(s3), Real(parse_rational("1e-20")));
    EXPECT_TRUE(r3.certified);
}

TEST(InequalityTest, Utilities) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 500; ++t) {
        std::vector<Real> a, b;
        const int len = 1 + static_cast<int>(rng() % 8);
        for (int j = 0; j < len; ++j) {
            a.push_back(Real(q(1 + static_cast<long>(rng() % 10000), 1 + static_cast<long>(rng() % 100))));
            b.push_back(Real(q(1 + static_cast<long>(rng() % 10000), 1 + static_cast<long>(rng() % 100))));
        }
        const Rational s = q(2 + static_cast<long>(rng() % 7), 2);
        EXPECT_TRUE(root_subadditivity(a, s).certified);
        EXPECT_TRUE(double_decker(a, b).certified);
    }
    EXPECT_THROW(root_subadditivity({Real(1), Real(-1)}, 2), DomainError);
    EXPECT_THROW(double_decker({Real(1)}, {Real(1), Real(2)}), DomainError);
    EXPECT_THROW(root_subadditivity({Real(1)}, q(1, 2)), DomainError);
}
