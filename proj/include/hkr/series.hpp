#pragma once

#include <string>
#include <vector>

#include "hkr/error.hpp"
#include "hkr/scalar/real.hpp"

namespace hkr::series {

// Terms scale * n^power * ratio^n.
struct SeriesSpec {
    Real power;
    Real ratio;
    Real scale = Real(1);
};

namespace detail {

// Eulerian numbers A(i, t), t = 0..i-1 (row i = 0 is {1}).
inline std::vector<Integer> eulerian_row(int i) {
    std::vector<Integer> row{1};
    for (int n = 1; n <= i; ++n) {
        std::vector<Integer> next(static_cast<std::size_t>(n), 0);
        for (int t = 0; t < n; ++t) {
            Integer v = 0;
            if (t < static_cast<int>(row.size())) v += Integer(t + 1) * row[static_cast<std::size_t>(t)];
            if (t >= 1 && t - 1 < static_cast<int>(row.size())) v += Integer(n - t) * row[static_cast<std::size_t>(t - 1)];
            next[static_cast<std::size_t>(t)] = v;
        }
        row = std::move(next);
    }
    return row;
}

inline Integer binomial(int n, int k) {
    Integer out;
    mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return out;
}

// sum_{j >= 0} j^i x^j, with 0^0 = 1.
inline Real base_sum(int i, const Real& x) {
    const Real one_minus = Real(1) - x;
    if (i == 0) return Real(1) / one_minus;
    const auto row = eulerian_row(i);
    Real num(0);
    Real xp = x;
    for (const auto& c : row) {
        num += Real(Rational(c)) * xp;
        xp *= x;
    }
    return num / one_minus.pow_int(i + 1);
}

inline void require_convergent(const Real& x) {
    if (x.certain_sign() <= 0) throw DomainError("series ratio must be positive");
    if (!certainly_less(x, Real(1)))
        throw DivergentSeriesError("series ratio is not certainly below 1");
}

} // namespace detail

// sum_{k >= from} k^a x^k for integer a >= 0 and 0 < x < 1, in closed form.
// Exact whenever x is exact.
inline Real polygeom_closed(int a, const Real& x, long from) {
    if (a < 0) throw DomainError("closed form needs a nonnegative integer power");
    if (from < 0) throw DomainError("from_index must be nonnegative");
    detail::require_convergent(x);
    // x^from * sum_j (j + from)^a x^j, expanded binomially in from.
    Real acc(0);
    for (int i = 0; i <= a; ++i) {
        const Integer coef = detail::binomial(a, i) * ipow(Integer(from), static_cast<unsigned long>(a - i));
        if (coef == 0) continue;
        acc += Real(Rational(coef)) * detail::base_sum(i, x);
    }
    return x.pow_int(from) * acc;
}

// Certified enclosure of sum_{n >= from} scale * n^a * x^n.
//
// Integer powers use the closed form (radius 0 for exact ratios). Other powers
// sum terms explicitly and bound the remainder by geometric domination: the
// term ratio ((n+1)/n)^a x decreases in n, so after the last summed index N the
// tail is at most t_{N+1} / (1 - q) with q = ((N+2)/(N+1))^a x.
inline Real polygeom_sum(const SeriesSpec& spec, long from, const Real& tolerance,
                         long max_terms = 200000) {
    if (tolerance.certain_sign() <= 0) throw DomainError("tolerance must be positive");
    if (spec.power.certain_sign() < 0) throw DomainError("series power must be nonnegative");
    detail::require_convergent(spec.ratio);
    const Real& a = spec.power;
    const Real& x = spec.ratio;
    if (a.is_exact() && is_integer(a.exact()) && a.exact() <= 64)
        return spec.scale * polygeom_closed(static_cast<int>(a.exact().get_num().get_si()), x, from);

    auto term = [&](long n) { return pow_real(Real(n), a) * x.pow_int(n); };
    Real partial(0);
    long n = std::max(from, 1L);
    for (long count = 0; count < max_terms; ++count, ++n) {
        partial += term(n);
        const Real q = pow_real(Real(make_rational(n + 2, n + 1)), a) * x;
        if (!certainly_less(q, Real(1))) continue;
        const Real tail = term(n + 1) / (Real(1) - q);
        if (certainly_le(tail, tolerance))
            return spec.scale * (partial + Real::between(Real(0), tail));
    }
    throw DepthError("polygeom_sum: tolerance not reached within " + std::to_string(max_terms) + " terms");
}

// sum_{k >= from} (k + w)^a x^k, assuming from + w >= 0 so no term is clipped.
// Integer a expands binomially into closed forms; other powers are summed with the
// same geometric-domination tail as polygeom_sum (the ratio ((k+1+w)/(k+w))^a x
// decreases in k).
inline Real shifted_polygeom_sum(const Real& a, const Real& w, const Real& x, long from,
                                 const Real& tolerance, long max_terms = 200000) {
    if (!certainly_ge(Real(from) + w, Real(0))) throw DomainError("shifted series: from + w must be >= 0");
    detail::require_convergent(x);
    if (a.is_exact() && is_integer(a.exact()) && a.exact() >= 0 && a.exact() <= 64) {
        const int ai = static_cast<int>(a.exact().get_num().get_si());
        Real acc(0);
        for (int i = 0; i <= ai; ++i) {
            const Real wpow = (ai - i == 0) ? Real(1) : w.pow_int(ai - i);
            if (wpow.is_exact() && wpow.exact() == 0) continue;
            acc += Real(Rational(detail::binomial(ai, i))) * wpow * polygeom_closed(i, x, from);
        }
        return acc;
    }
    auto base = [&](long k) {
        const Real b = Real(k) + w;
        return b.certain_sign() > 0 ? pow_real(b, a) : Real(0);
    };
    Real partial(0);
    long k = from;
    for (long count = 0; count < max_terms; ++count, ++k) {
        partial += base(k) * x.pow_int(k);
        const Real lo = Real(k + 1) + w;
        if (lo.certain_sign() <= 0) continue;
        const Real q = pow_real((Real(k + 2) + w) / lo, a) * x;
        if (!certainly_less(q, Real(1))) continue;
        const Real tail = base(k + 1) * x.pow_int(k + 1) / (Real(1) - q);
        if (certainly_le(tail, tolerance)) return partial + Real::between(Real(0), tail);
    }
    throw DepthError("shifted_polygeom_sum: tolerance not reached");
}

// Limit of consecutive term ratios of scale * n^a * x^n, which is x.
inline Real ratio_test(const SeriesSpec& spec) { return spec.ratio; }

// Term ratio 2 * 3^(-r/s) of the bound series sum_k 2^k k 3^(-k r / s)
// that controls the AC_s sums of the counterexample.
inline Real star_family_ratio(const Rational& r, const Rational& s) {
    if (s <= 0) throw DomainError("exponent s must be positive");
    return Real(2) * pow_real(Real(3), Real(Rational(-r / s)));
}

// Exact comparison of 2 * 3^(-r/s) against 1, i.e. 2^s against 3^r, done on
// integers after clearing the denominators of r and s.
inline Verdict star_family_ratio_vs_one(const Rational& r, const Rational& s) {
    if (r <= 0 || s <= 0) throw DomainError("r and s must be positive");
    // 2^s vs 3^r  <=>  2^(s*D) vs 3^(r*D) with D = den(r) * den(s).
    const Integer d = r.get_den() * s.get_den();
    const Rational se = s * Rational(d), re = r * Rational(d);
    if (!se.get_num().fits_ulong_p() || !re.get_num().fits_ulong_p())
        throw DomainError("exponents too large for exact comparison");
    const Integer lhs = ipow(Integer(2), se.get_num().get_ui());
    const Integer rhs = ipow(Integer(3), re.get_num().get_ui());
    const int c = cmp(lhs, rhs);
    return c > 0 ? Verdict::CertainlyGreater : c < 0 ? Verdict::CertainlyLess : Verdict::Overlapping;
}

} // namespace hkr::series
