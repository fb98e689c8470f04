#pragma once

#include <vector>

#include "hkr/series.hpp"
#include "hkr/stepfn.hpp"

namespace hkr {

// Values computed two ways agree: equal when both are exact, otherwise overlapping
// enclosures whose combined width is within tol.
inline bool agree(const Real& a, const Real& b, const Real& tol) {
    if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
    return compare(a, b) == Verdict::Overlapping && Rational(a.width() + b.width()) <= tol.lower();
}

struct NullsetRow {
    int n = 0;
    Real remaining;  // 2^n r_n from the scheme
    Real expected;   // (2 / 4^r)^n
    bool certified = false;
};

struct ResidualRow {
    int n = 0;
    Real r_n;
    Real halved;  // (r_{n-1} - u_n) / 2
    Real ratio;   // u_n / (4^r - 2)
    bool certified = false;
};

struct NullsetReport {
    std::vector<NullsetRow> rows;
    std::vector<ResidualRow> residual_rows;
    int terms = 0;
    Real series;       // partial sum of 2^{n-1} / 4^{rn} plus a geometric tail enclosure
    Real closed;       // 1 / (4^r - 2)
    Real removed;      // (4^r - 2) * series, the total removed length
    bool series_certified = false;
    bool certified = false;
};

// Remaining measure, residual identities and sum_{n>=1} 2^{n-1} u_n = 1.
inline NullsetReport nullset_report(const Scheme& scheme, int depth, const Real& tol) {
    if (depth < 1 || depth > scheme.depth_cap()) throw DomainError("nullset depth must be in [1, depth_cap]");
    PrecisionScope scope(scheme.params().precision);
    NullsetReport rep;
    const Real four_r = scheme.r() == 1 ? Real(4) : pow_real(Real(4), Real(scheme.r()));
    const Real ratio = Real(2) / four_r;
    bool all = true;
    for (int n = 0; n <= depth; ++n) {
        NullsetRow row{n, Real(pow_int(Rational(2), n)) * scheme.residual_length(n), ratio.pow_int(n)};
        row.certified = agree(row.remaining, row.expected, tol) &&
                        (n == 0 || certainly_less(row.remaining, rep.rows.back().remaining)) && row.remaining.certain_sign() > 0;
        all = all && row.certified;
        rep.rows.push_back(std::move(row));
    }
    for (int n = 1; n <= depth; ++n) {
        const Real& u = scheme.u_length(n);
        ResidualRow row{n, scheme.residual_length(n), (scheme.residual_length(n - 1) - u) / Real(2), u / (four_r - Real(2))};
        row.certified = agree(row.r_n, row.halved, tol) && agree(row.r_n, row.ratio, tol) && certainly_less(row.r_n, u);
        all = all && row.certified;
        rep.residual_rows.push_back(std::move(row));
    }

    // Partial sums until the geometric tail 2^N / 4^{r(N+1)} / (1 - 2/4^r) drops below tol / 4.
    Real partial(0), term = Real(1) / four_r;  // 2^{n-1} / 4^{rn} at n = 1
    const Real tail_factor = Real(1) / (Real(1) - ratio);
    int n = 1;
    for (;; ++n) {
        partial += term;
        term *= ratio;
        if (certainly_le(term * tail_factor, tol / Real(4)) || n >= 100000) break;
    }
    rep.terms = n;
    rep.series = partial + Real::between(Real(0), term * tail_factor);
    rep.closed = Real(1) / (four_r - Real(2));
    rep.removed = (four_r - Real(2)) * rep.series;
    rep.series_certified = rep.series.lower() <= rep.closed.lower() &&
                           rep.closed.upper() <= rep.series.upper() && rep.series.width() <= tol.lower() &&
                           compare(rep.removed, Real(1)) == Verdict::Overlapping;
    rep.certified = all && rep.series_certified;
    return rep;
}

struct NormReport {
    Rational r;
    int pieces = 0;
    Real direct;  // sum of integrals over equal pieces not aligned with the construction
    Real series;  // (4^r - 2)/2 * sum_k k^r (2 / 12^r)^k
    bool certified = false;
};

// int_0^1 |F|^r computed by direct integration and by the series, independently.
inline NormReport norm_report(const CounterexampleF& F, const Real& tol, int pieces = 97) {
    const Scheme& scheme = F.scheme();
    PrecisionScope scope(scheme.params().precision);
    NormReport rep;
    rep.r = scheme.r();
    rep.pieces = pieces;
    rep.direct = Real(0);
    const Real piece_tol = tol / Real(4 * pieces);
    for (int j = 0; j < pieces; ++j)
        rep.direct += F.integrate_abs_power(Real(make_rational(j, pieces)), Real(make_rational(j + 1, pieces)), rep.r, piece_tol);
    const Real twelve_r = scheme.r() == 1 ? Real(12) : pow_real(Real(12), Real(scheme.r()));
    const Real x = Real(2) / twelve_r;
    rep.series = (scheme.four_r() - Real(2)) / Real(2) * series::polygeom_sum({Real(rep.r), x}, 1, tol / Real(4));
    rep.certified = agree(rep.direct, rep.series, tol);
    return rep;
}

} // namespace hkr
