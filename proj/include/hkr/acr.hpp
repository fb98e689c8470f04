#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hkr/error.hpp"
#include "hkr/series.hpp"
#include "hkr/stepfn.hpp"

namespace hkr {

enum class TagKind { LeftEndpoint, RightEndpoint, Limit };

inline const char* to_string(TagKind k) {
    switch (k) {
    case TagKind::LeftEndpoint: return "left_endpoint";
    case TagKind::RightEndpoint: return "right_endpoint";
    case TagKind::Limit: return "limit";
    }
    return "?";
}

inline TagKind parse_tag_kind(std::string_view s) {
    if (s == "left_endpoint") return TagKind::LeftEndpoint;
    if (s == "right_endpoint") return TagKind::RightEndpoint;
    if (s == "limit") return TagKind::Limit;
    throw ValidationError("unknown tag_kind: " + std::string(s));
}

// [c, d] tagged at a point of P given by its address.
struct TaggedInterval {
    Real c, d;
    PPoint tag;

    static TaggedInterval make(const Real& c, const Real& d, const std::string& tag_path, TagKind kind) {
        const PPoint p = kind == TagKind::Limit ? PPoint::parse(tag_path)
                         : kind == TagKind::LeftEndpoint ? PPoint::left_endpoint(DescentPath::parse(tag_path))
                                                         : PPoint::right_endpoint(DescentPath::parse(tag_path));
        return {c, d, p};
    }

    TagKind kind() const {
        if (tag.period == DescentPath::parse("L")) return TagKind::LeftEndpoint;
        if (tag.period == DescentPath::parse("R")) return TagKind::RightEndpoint;
        return TagKind::Limit;
    }
    std::string tag_path() const { return kind() == TagKind::Limit ? tag.str() : tag.prefix.str(); }
    Real length() const { return d - c; }
};

using TaggedCollection = std::vector<TaggedInterval>;

// Checks c < d inside [0,1], tags inside their intervals, and disjoint interiors.
// Returns the tag coordinates.
inline std::vector<Real> validate_collection(const Scheme& scheme, const TaggedCollection& coll) {
    std::vector<Real> tags;
    tags.reserve(coll.size());
    for (std::size_t i = 0; i < coll.size(); ++i) {
        const auto& I = coll[i];
        if (!certainly_less(I.c, I.d)) throw ValidationError("interval " + std::to_string(i) + " needs c < d");
        if (!certainly_ge(I.c, Real(0)) || !certainly_le(I.d, Real(1)))
            throw ValidationError("interval " + std::to_string(i) + " leaves [0,1]");
        Real x = scheme.point(I.tag);
        if (!certainly_le(I.c, x) || !certainly_le(x, I.d))
            throw ValidationError("tag of interval " + std::to_string(i) + " is not certified inside it");
        tags.push_back(std::move(x));
    }
    std::vector<std::size_t> order(coll.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coll[a].c.lower() < coll[b].c.lower(); });
    for (std::size_t j = 1; j < order.size(); ++j)
        if (!certainly_le(coll[order[j - 1]].d, coll[order[j]].c))
            throw ValidationError("intervals " + std::to_string(order[j - 1]) + " and " + std::to_string(order[j]) +
                                  " overlap");
    return tags;
}

namespace detail {
inline Real root_s(const Real& v, const Rational& s) {
    if (s == 1) return v;
    if (v.is_exact() && v.exact() == 0) return Real(0);
    return pos_pow(v, Rational(1 / s));
}
} // namespace detail

// sum_i ((1/|I_i|) int_{I_i} |F|^s)^{1/s}; tags lie in P, where F vanishes.
inline Real ac_sum(const CounterexampleF& F, const TaggedCollection& coll, const Rational& s, const Real& tol) {
    validate_collection(F.scheme(), coll);
    Real total(0);
    for (const auto& I : coll) {
        const Real mean = F.integrate_abs_power(I.c, I.d, s, tol) / I.length();
        total += detail::root_s(mean, s);
    }
    return total;
}

// Minimal n >= 1 with 3^{1/r} sum_{k>n} k (2/3)^k < epsilon, and eta = (u_n - v_n)/2.
struct EtaChoice {
    int n = 0;
    Real eta;
    Real tail;  // 3^{1/r} sum_{k>n} k (2/3)^k at the chosen n
};

inline Real selection_tail(const Rational& r, int n) {
    const Real t = series::polygeom_closed(1, Real(make_rational(2, 3)), n + 1);
    return r == 1 ? Real(3) * t : pow_real(Real(3), Real(Rational(1 / r))) * t;
}

inline EtaChoice epsilon_to_eta(const Scheme& scheme, const Rational& epsilon, mpfr_prec_t cap_bits = 4096) {
    if (epsilon <= 0) throw DomainError("epsilon must be positive");
    const Real eps(epsilon);
    for (int n = 1; n <= scheme.depth_cap(); ++n) {
        const bool below = with_escalation(
            [&](mpfr_prec_t) -> std::optional<bool> {
                const Verdict v = compare(selection_tail(scheme.r(), n), eps);
                if (v == Verdict::Overlapping && !certainly_equal(selection_tail(scheme.r(), n), eps))
                    return std::nullopt;
                return v == Verdict::CertainlyLess;
            },
            scheme.params().precision, cap_bits);
        if (below) return {n, scheme.margin(n), selection_tail(scheme.r(), n)};
    }
    throw DepthError("epsilon too small for depth_cap");
}

// One removed interval J of rank k meeting I_i at its core.
struct PairEntry {
    std::size_t i = 0;
    int rank = 0;
    DescentPath path;
    Real overlap;     // |I_i ∩ J|
    Real local_mean;  // (1/|I_i ∩ J|) int_{I_i ∩ J} |F|^s
    Real local_root;  // local_mean^{1/s}
    bool overlap_ok = false;  // |I ∩ J| > (u_k - v_k)/2 >= u_k / 3
    bool bound_ok = false;    // local_mean <= 3 k^s / 3^{kr}
};

// All removed intervals inside a residual segment of rank m lying in I_i.
struct SegmentEntry {
    std::size_t i = 0;
    int rank = 0;
    DescentPath path;
    Real sum_mean;
    std::optional<Real> sum_root;  // absent when the series diverges
    bool unresolved = false;       // segment only partly inside I_i at depth_cap; sums are upper bounds
};

struct IntervalRow {
    Real mean;         // (1/|I|) int_I |F|^s
    Real lhs;          // mean^{1/s}
    Real inner;        // sum_J local_mean
    Real middle1;      // inner^{1/s}
    std::optional<Real> middle2;  // sum_J local_root
};

struct RankRow {
    int rank = 0;
    long pairs = 0;
    Real sum_root;
};

struct ChainReport {
    int n = 0;
    Rational s;
    Real eta;
    Real total_length;
    Real lhs, middle1;
    std::optional<Real> middle2, closed_bound;  // absent when divergent
    std::vector<IntervalRow> intervals;
    std::vector<PairEntry> pairs;
    std::vector<SegmentEntry> segments;
    std::vector<RankRow> ranks;
    bool hypothesis_ok = false;
    bool cores_avoided = false;
    bool overlaps_ok = false;
    bool local_bounds_ok = false;
    bool incidence_ok = false;
    bool link1 = false, link2 = false, link3 = false;
    bool certified = false;
    std::vector<std::string> notes;
};

// Closed forms over the removed intervals inside one rank-m segment:
//   sum of local means  2^{-m-1} sum_{k>m} k^s (2 3^{-r})^k
//   sum of their roots  2^{-m-1} sum_{k>m} k (2 3^{-r/s})^k   (finite iff 2^s < 3^r)
class ChainSums {
public:
    ChainSums(const Scheme& scheme, Rational s) : scheme_(&scheme), s_(std::move(s)) {
        PrecisionScope scope(scheme.params().precision);
        mean_ratio_ = Real(2) / scheme.three_r();
        convergent_ = series::star_family_ratio_vs_one(scheme.r(), s_) == Verdict::CertainlyLess;
        root_ratio_ = s_ == scheme.r() ? Real(make_rational(2, 3)) : series::star_family_ratio(scheme.r(), s_);
        three_root_ = s_ == 1 ? Real(3) : pow_real(Real(3), Real(Rational(1 / s_)));
    }

    bool convergent() const { return convergent_; }

    const Real& sum_mean(int m) const {
        return cached(mean_cache_, m, [&] {
            return Real(pow_int(Rational(2), -(m + 1))) *
                   series::polygeom_sum({Real(s_), mean_ratio_}, m + 1, tol());
        });
    }
    std::optional<Real> sum_root(int m) const {
        if (!convergent_) return std::nullopt;
        return cached(root_cache_, m, [&] {
            return Real(pow_int(Rational(2), -(m + 1))) * series::polygeom_closed(1, root_ratio_, m + 1);
        });
    }
    // 3^{1/s} sum_{k>n} k (2 3^{-r/s})^k
    std::optional<Real> closed_bound(int n) const {
        if (!convergent_) return std::nullopt;
        return three_root_ * series::polygeom_closed(1, root_ratio_, n + 1);
    }
    // 3 k^s / 3^{kr}
    Real local_bound(int k) const { return Real(3) * pow_real(Real(k), Real(s_)) / scheme_->three_r().pow_int(k); }

private:
    template <class Fn>
    const Real& cached(std::vector<std::optional<Real>>& cache, int m, Fn&& make) const {
        if (static_cast<int>(cache.size()) <= m) cache.resize(static_cast<std::size_t>(m) + 1);
        auto& slot = cache[static_cast<std::size_t>(m)];
        if (!slot) {
            PrecisionScope scope(scheme_->params().precision);
            slot = make();
        }
        return *slot;
    }
    Real tol() const { return Real(pow_int(Rational(2), -(scheme_->params().precision / 2))); }

    const Scheme* scheme_;
    Rational s_;
    Real mean_ratio_, root_ratio_, three_root_;
    bool convergent_ = false;
    mutable std::vector<std::optional<Real>> mean_cache_, root_cache_;
};

namespace detail {

inline void add_opt(std::optional<Real>& acc, const std::optional<Real>& v) {
    if (acc && v) *acc += *v;
    else acc.reset();
}

// Splits I_i into the removed intervals whose cores it meets.
inline void decompose(const CounterexampleF& F, const ChainSums& sums, std::size_t i, const TaggedInterval& I,
                      const Rational& s, int n, ChainReport& rep, Real& inner, std::optional<Real>& root_sum,
                      Real& mass_sum, bool& within) {
    const Scheme& scheme = F.scheme();
    std::vector<ResidualSegment> stack{scheme.root()};
    while (!stack.empty()) {
        const ResidualSegment T = std::move(stack.back());
        stack.pop_back();
        if (certainly_le(T.hi, I.c) || certainly_le(I.d, T.lo)) continue;
        if (certainly_le(I.c, T.lo) && certainly_le(T.hi, I.d)) {
            SegmentEntry e{i, T.rank, T.path, sums.sum_mean(T.rank), sums.sum_root(T.rank), false};
            inner += e.sum_mean;
            mass_sum += F.segment_mass(T.rank, s);
            add_opt(root_sum, e.sum_root);
            if (T.rank < n) rep.cores_avoided = false;
            rep.segments.push_back(std::move(e));
            continue;
        }
        if (T.rank >= scheme.depth_cap()) {
            SegmentEntry e{i, T.rank, T.path, Real::between(Real(0), sums.sum_mean(T.rank)), std::nullopt, true};
            if (auto r = sums.sum_root(T.rank)) e.sum_root = Real::between(Real(0), *r);
            inner += e.sum_mean;
            mass_sum += Real::between(Real(0), F.segment_mass(T.rank, s));
            add_opt(root_sum, e.sum_root);
            if (T.rank < n) rep.cores_avoided = false;
            rep.segments.push_back(std::move(e));
            continue;
        }
        const RemovedInterval J = scheme.removed_of(T);
        const Real clo = max(J.core.lo, I.c), chi = min(J.core.hi, I.d);
        if (!certainly_le(chi, clo)) {
            PairEntry p;
            p.i = i;
            p.rank = J.rank;
            p.path = J.path;
            p.overlap = min(J.hi, I.d) - max(J.lo, I.c);
            const Real mass = pow_real(Real(J.rank), Real(s)) * max(Real(0), chi - clo);
            p.local_mean = mass / p.overlap;
            mass_sum += mass;
            within = within && certainly_le(p.overlap, I.length());
            p.local_root = root_s(p.local_mean, s);
            const Real& margin = scheme.margin(J.rank);
            p.overlap_ok = certainly_greater(p.overlap, margin) && certainly_ge(margin, scheme.u_length(J.rank) / Real(3));
            p.bound_ok = certainly_le(p.local_mean, sums.local_bound(J.rank));
            if (J.rank <= n) rep.cores_avoided = false;
            rep.overlaps_ok = rep.overlaps_ok && p.overlap_ok;
            rep.local_bounds_ok = rep.local_bounds_ok && p.bound_ok;
            inner += p.local_mean;
            add_opt(root_sum, p.local_root);
            rep.pairs.push_back(std::move(p));
        }
        stack.push_back(scheme.child(T, Side::Right));
        stack.push_back(scheme.child(T, Side::Left));
    }
}

} // namespace detail

// Evaluates lhs <= middle1 <= middle2 <= closed_bound for the collection.
//   lhs     = sum_i ((1/|I_i|) int_{I_i} |F|^s)^{1/s}         (direct integration)
//   middle1 = sum_i (sum_J (1/|I_i ∩ J|) int_{I_i ∩ J} |F|^s)^{1/s}
//   middle2 = sum_{i,J} ((1/|I_i ∩ J|) int_{I_i ∩ J} |F|^s)^{1/s}
//   closed  = 3^{1/s} sum_{k>n} k (2 3^{-r/s})^k
// J runs over removed intervals whose core meets I_i. Each link is certified from
// computed enclosures, per interval where it holds termwise.
inline ChainReport chain_verify(const CounterexampleF& F, const ChainSums& sums, const TaggedCollection& coll, int n,
                                const Rational& s, const Real& tol) {
    const Scheme& scheme = F.scheme();
    validate_collection(scheme, coll);
    ChainReport rep;
    rep.n = n;
    rep.s = s;
    rep.eta = scheme.margin(n);
    rep.total_length = Real(0);
    for (const auto& I : coll) rep.total_length += I.length();
    rep.hypothesis_ok = certainly_less(rep.total_length, rep.eta);
    rep.cores_avoided = rep.overlaps_ok = rep.local_bounds_ok = true;
    rep.link1 = rep.link2 = true;
    rep.lhs = rep.middle1 = Real(0);
    rep.middle2 = Real(0);

    for (std::size_t i = 0; i < coll.size(); ++i) {
        const auto& I = coll[i];
        IntervalRow row;
        row.mean = F.integrate_abs_power(I.c, I.d, s, tol) / I.length();
        row.lhs = detail::root_s(row.mean, s);
        row.inner = Real(0);
        row.middle2 = Real(0);
        const std::size_t first_pair = rep.pairs.size();
        const std::size_t first_segment = rep.segments.size();
        Real mass(0);
        bool within = true;
        detail::decompose(F, sums, i, I, s, n, rep, row.inner, row.middle2, mass, within);
        row.middle1 = detail::root_s(row.inner, s);

        // Link 1 compares before the root, which is monotone. When the two sides tie
        // (one pair), it follows termwise from |I ∩ J| <= |I| once the decomposed mass
        // is confirmed against the direct integral.
        const Real direct = row.mean * I.length();
        const bool consistent = !certainly_less(direct, mass) && !certainly_less(mass, direct);
        if (!(certainly_le(row.mean, row.inner) || (within && consistent))) rep.link1 = false;
        if (!consistent) rep.notes.push_back("interval " + std::to_string(i) + ": decomposed mass disagrees with the integral");
        // Link 2 is an identity for s = 1 or a single term; otherwise compare enclosures.
        const std::size_t terms = (rep.pairs.size() - first_pair) + (rep.segments.size() - first_segment);
        if (row.middle2) {
            if (!(s == 1 || terms <= 1 || certainly_le(row.middle1, *row.middle2))) rep.link2 = false;
        }
        rep.lhs += row.lhs;
        rep.middle1 += row.middle1;
        detail::add_opt(rep.middle2, row.middle2);
        rep.intervals.push_back(std::move(row));
    }

    // Per-rank incidence: explicit pairs plus 2^{k-m-1} from each fully covered rank-m segment.
    std::map<int, RankRow> ranks;
    for (const auto& p : rep.pairs) {
        auto& row = ranks[p.rank];
        row.rank = p.rank;
        ++row.pairs;
        row.sum_root += p.local_root;
    }
    int top = n + 1;
    for (const auto& p : rep.pairs) top = std::max(top, p.rank);
    for (const auto& e : rep.segments) top = std::max(top, e.rank + 1);
    rep.incidence_ok = true;
    for (int k = n + 1; k <= top; ++k) {
        Integer count = ranks.count(k) ? Integer(ranks[k].pairs) : Integer(0);
        for (const auto& e : rep.segments)
            if (e.rank < k) count += ipow(Integer(2), static_cast<unsigned long>(k - e.rank - 1));
        if (count > ipow(Integer(2), static_cast<unsigned long>(k))) rep.incidence_ok = false;
    }
    // Beyond `top`, segment counts scale by 2 per rank: need sum_e 2^{-m_e-1} + pairs <= 1 in units of 2^k.
    Rational weight = 0;
    for (const auto& e : rep.segments) weight += pow_int(Rational(2), -(e.rank + 1));
    if (weight > 1) rep.incidence_ok = false;
    for (auto& [k, row] : ranks) rep.ranks.push_back(row);

    rep.closed_bound = sums.closed_bound(n);
    if (!rep.middle2) {
        rep.link2 = false;
        rep.link3 = false;
        rep.notes.push_back("root sums diverge: 2^s >= 3^r");
    } else if (!rep.closed_bound) {
        rep.link3 = false;
    } else {
        rep.link3 = certainly_le(*rep.middle2, *rep.closed_bound);
    }
    if (!rep.hypothesis_ok) rep.notes.push_back("hypothesis fails: total length not below eta; chain not asserted");
    rep.certified = rep.hypothesis_ok && rep.cores_avoided && rep.overlaps_ok && rep.local_bounds_ok && rep.incidence_ok &&
                    rep.link1 && rep.link2 && rep.link3;
    return rep;
}

inline ChainReport chain_verify(const CounterexampleF& F, const TaggedCollection& coll, int n, const Rational& s,
                                const Real& tol) {
    const ChainSums sums(F.scheme(), s);
    return chain_verify(F, sums, coll, n, s, tol);
}

// Threshold of the AC_s bound chain: s_star = r log2 3 and the term ratio 2 * 3^{-r/s}.
enum class SeriesVerdict { Convergent, Divergent, Critical };

inline const char* to_string(SeriesVerdict v) {
    switch (v) {
    case SeriesVerdict::Convergent: return "Convergent";
    case SeriesVerdict::Divergent: return "Divergent";
    case SeriesVerdict::Critical: return "Critical";
    }
    return "?";
}

struct ThresholdReport {
    Rational s;
    Real s_star;
    Real ratio_limit;
    SeriesVerdict verdict = SeriesVerdict::Critical;
};

inline ThresholdReport acs_threshold(const Scheme& scheme, const Rational& s) {
    if (s < 1) throw DomainError("s must be >= 1");
    PrecisionScope scope(scheme.params().precision);
    ThresholdReport out;
    out.s = s;
    out.s_star = Real(scheme.r()) * log2_real(Real(3));
    out.ratio_limit = s == scheme.r() ? Real(make_rational(2, 3)) : series::star_family_ratio(scheme.r(), s);
    switch (series::star_family_ratio_vs_one(scheme.r(), s)) {
    case Verdict::CertainlyLess: out.verdict = SeriesVerdict::Convergent; break;
    case Verdict::CertainlyGreater: out.verdict = SeriesVerdict::Divergent; break;
    case Verdict::Overlapping: out.verdict = SeriesVerdict::Critical; break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Adversarial search

struct SearchOptions {
    long budget = 1000;
    std::uint64_t seed = 1;
    int rank_span = 6;      // ranks explored beyond n
    int max_intervals = 6;  // per collection
    bool verify_chains = false;
    std::optional<TaggedCollection> forced;  // evaluated first, and alone when budget = 1
};

struct SearchResult {
    TaggedCollection best;
    Real best_sum;
    long evaluated = 0;
    long violations = 0;      // ac_sum certainly >= epsilon
    long undecided = 0;       // neither certainly below nor above epsilon
    long chain_failures = 0;  // chain not certified (only with verify_chains)
    long best_index = -1;
};

namespace detail {

// Bounded integer in [0, n) from the raw generator; the tiny modulo bias is irrelevant here
// and keeps results identical across standard libraries.
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

inline DescentPath random_path(std::mt19937_64& rng, int len) {
    std::vector<Side> bits;
    bits.reserve(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) bits.push_back(below(rng, 2) ? Side::Right : Side::Left);
    return DescentPath(std::move(bits));
}

// Candidate intervals anchored at the two ends of a removed interval J (both in P) and
// reaching into J's core, which is where the AC sum can collect mass.
class CandidateGenerator {
public:
    CandidateGenerator(const Scheme& scheme, int n, int span) : scheme_(&scheme), n_(n), span_(span) {}

    TaggedInterval one(std::mt19937_64& rng) const {
        switch (below(rng, 4)) {
        case 0: return straddle(rng);
        case 1: return covering(rng);
        case 2: return segment(rng);
        default: return straddle(rng, true);
        }
    }

    // Tag at an end of J, other end inside or beyond J's core.
    TaggedInterval straddle(std::mt19937_64& rng, bool extend_outside = false) const {
        const int k = n_ + 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(span_)));
        const DescentPath parent = random_path(rng, k - 1);
        const RemovedInterval J = scheme_->removed_interval(parent);
        const Real core_len = J.core.hi - J.core.lo;
        const Rational frac = make_rational(1 + static_cast<long>(below(rng, 8)), 8);
        const Rational out_frac = extend_outside ? make_rational(static_cast<long>(below(rng, 4)), 8) : Rational(0);
        const Real child = scheme_->residual_length(k);
        if (below(rng, 2) == 0) {
            // [J.lo - out, core.lo + frac * |core|], tag J.lo = right end of the left child.
            return {J.lo - Real(out_frac) * child, J.core.lo + Real(frac) * core_len,
                    PPoint::right_endpoint(parent.child(Side::Left))};
        }
        return {J.core.hi - Real(frac) * core_len, J.hi + Real(out_frac) * child,
                PPoint::left_endpoint(parent.child(Side::Right))};
    }

    // Covers the whole of J plus part of one neighbouring child.
    TaggedInterval covering(std::mt19937_64& rng) const {
        const int k = n_ + 1 + static_cast<int>(below(rng, static_cast<std::uint64_t>(span_)));
        const DescentPath parent = random_path(rng, k - 1);
        const RemovedInterval J = scheme_->removed_interval(parent);
        const Real child = scheme_->residual_length(k);
        const Rational frac = make_rational(static_cast<long>(below(rng, 5)), 4);
        if (below(rng, 2) == 0)
            return {J.lo - Real(frac) * child, J.hi, PPoint::left_endpoint(parent.child(Side::Right))};
        return {J.lo, J.hi + Real(frac) * child, PPoint::right_endpoint(parent.child(Side::Left))};
    }

    // A whole residual segment, optionally with the margin of the removed interval next to it.
    TaggedInterval segment(std::mt19937_64& rng) const {
        const int m = n_ + static_cast<int>(below(rng, static_cast<std::uint64_t>(span_)));
        const DescentPath path = random_path(rng, m);
        const ResidualSegment T = scheme_->residual_segment(path);
        return {T.lo, T.hi, below(rng, 2) ? PPoint::left_endpoint(path) : PPoint::right_endpoint(path)};
    }

private:
    const Scheme* scheme_;
    int n_;
    int span_;
};

inline bool fits(const TaggedCollection& coll, const TaggedInterval& cand, const Real& eta, const Real& used) {
    if (!certainly_le(Real(0), cand.c) || !certainly_le(cand.d, Real(1))) return false;
    if (!certainly_less(used + cand.length(), eta)) return false;
    for (const auto& I : coll)
        if (!(certainly_le(I.d, cand.c) || certainly_le(cand.d, I.c))) return false;
    return true;
}

inline void sort_collection(TaggedCollection& coll) {
    std::sort(coll.begin(), coll.end(), [](const TaggedInterval& a, const TaggedInterval& b) { return a.c.lower() < b.c.lower(); });
}

} // namespace detail

// Seeded random + greedy search for collections with a large AC sum under
// sum |I_i| < eta. Every candidate is evaluated with certified arithmetic; the
// search is a falsification attempt, so where it looks does not affect soundness.
inline SearchResult adversarial_search(const CounterexampleF& F, int n, const Real& eta, const Rational& s,
                                       const Rational& epsilon, const SearchOptions& opt, const Real& tol) {
    if (opt.budget < 1) throw ValidationError("search budget must be >= 1");
    if (eta.certain_sign() <= 0) throw DomainError("eta must be positive");
    const Scheme& scheme = F.scheme();
    const ChainSums sums(scheme, s);
    std::mt19937_64 rng(opt.seed);
    const detail::CandidateGenerator gen(scheme, n, std::max(1, std::min(opt.rank_span, scheme.depth_cap() - n - 1)));
    const Real eps(epsilon);

    SearchResult res;
    res.best_sum = Real(-1);
    auto evaluate = [&](TaggedCollection coll) {
        detail::sort_collection(coll);
        const Real sum = ac_sum(F, coll, s, tol);
        const Verdict v = compare(sum, eps);
        if (v == Verdict::CertainlyGreater || certainly_equal(sum, eps)) ++res.violations;
        else if (v == Verdict::Overlapping) ++res.undecided;
        if (opt.verify_chains && !chain_verify(F, sums, coll, n, s, tol).certified) ++res.chain_failures;
        if (res.best_index < 0 || sum.lower() > res.best_sum.lower()) {
            res.best = std::move(coll);
            res.best_sum = sum;
            res.best_index = res.evaluated;
        }
        ++res.evaluated;
    };

    auto fresh = [&]() {
        TaggedCollection coll;
        Real used(0);
        const int want = 1 + static_cast<int>(detail::below(rng, static_cast<std::uint64_t>(opt.max_intervals)));
        for (int tries = 0; tries < 4 * want && static_cast<int>(coll.size()) < want; ++tries) {
            TaggedInterval cand = gen.one(rng);
            if (!detail::fits(coll, cand, eta, used)) continue;
            used += cand.length();
            coll.push_back(std::move(cand));
        }
        return coll;
    };

    auto mutate = [&](const TaggedCollection& base) {
        TaggedCollection coll = base;
        auto op = detail::below(rng, 3);
        if (static_cast<int>(coll.size()) >= opt.max_intervals && op == 2) op = 1;
        if (op == 0 && !coll.empty()) {
            coll.erase(coll.begin() + static_cast<long>(detail::below(rng, coll.size())));
        } else if (op == 1 && !coll.empty()) {
            coll[detail::below(rng, coll.size())] = coll.back();
            coll.pop_back();
        }
        Real used(0);
        for (const auto& I : coll) used += I.length();
        for (int tries = 0; tries < 8; ++tries) {
            TaggedInterval cand = gen.one(rng);
            if (!detail::fits(coll, cand, eta, used)) continue;
            coll.push_back(std::move(cand));
            break;
        }
        return coll;
    };

    if (opt.forced) evaluate(*opt.forced);
    while (res.evaluated < opt.budget) {
        const bool greedy = res.best_index >= 0 && !res.best.empty() && detail::below(rng, 2) == 0;
        TaggedCollection coll = greedy ? mutate(res.best) : fresh();
        if (coll.empty()) coll = fresh();
        if (coll.empty()) continue;
        evaluate(std::move(coll));
    }
    return res;
}

// Every rank-k removed interval inside the segment at `parent_path`, each covered from
// its left end (a point of P) through the end of its core.
inline TaggedCollection layer_collection(const Scheme& scheme, const DescentPath& parent_path, int k) {
    const int m = static_cast<int>(parent_path.size());
    if (k <= m) throw DomainError("layer rank must exceed the parent rank");
    TaggedCollection out;
    const std::uint64_t count = std::uint64_t{1} << (k - m - 1);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        DescentPath p = parent_path;
        for (int b = k - m - 2; b >= 0; --b) p = p.child((idx >> b) & 1 ? Side::Right : Side::Left);
        const RemovedInterval J = scheme.removed_interval(p);
        out.push_back({J.lo, J.core.hi, PPoint::right_endpoint(p.child(Side::Left))});
    }
    return out;
}

} // namespace hkr
