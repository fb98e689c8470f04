#pragma once

#include <string>
#include <vector>

#include "hkr/error.hpp"
#include "hkr/stepfn.hpp"

namespace hkr {

// A point x of P with a rank n at which x lies in the Left child of its rank-(n-1)
// segment; h_n runs from x to the right end of that segment's removed interval.
struct BlowupSite {
    PPoint x_path;
    Real x;
    int n = 0;
    Real h;
    RemovedInterval u;
};

inline BlowupSite make_site(const Scheme& scheme, const PPoint& x_path, int n) {
    if (n < 1) throw DomainError("site rank must be >= 1");
    if (n > scheme.depth_cap()) throw DepthError("site rank beyond depth_cap");
    if (x_path.at(static_cast<std::size_t>(n - 1)) != Side::Left)
        throw ValidationError("site ineligible: the address turns Right at rank " + std::to_string(n));
    BlowupSite site;
    site.x_path = x_path;
    site.x = scheme.point(x_path);
    site.n = n;
    site.u = scheme.removed_interval(x_path.path_prefix(static_cast<std::size_t>(n - 1)));
    site.h = site.u.hi - site.x;
    return site;
}

// (1/h_n^2) int_0^{h_n} [F(x+t) - (R(x+t) - R(x)) - alpha t]_+ dt
inline Real blowup_quantity(const CounterexampleF& F, const BlowupSite& site, const Rational& alpha,
                            const MonotoneStep* R, const Real& tol) {
    const Real integral = F.integrate_plus_linear(site.x, site.h, alpha, 0, 1, R, tol * site.h * site.h);
    return integral / (site.h * site.h);
}

struct LowerBound {
    Real closed;        // (4/3)^{nr} / (4 (4^r - 2))
    Real intermediate;  // v_n / (4 u_n^2)
    bool equal_certified = false;
};

inline LowerBound blowup_lower_bound(const Scheme& scheme, int n) {
    if (n < 1) throw DomainError("rank must be >= 1");
    PrecisionScope scope(scheme.params().precision);
    LowerBound out;
    const Real nr(Rational(Rational(n) * scheme.r()));
    out.closed = pow_real(Real(make_rational(4, 3)), nr) / (Real(4) * (scheme.four_r() - Real(2)));
    const Real& u = scheme.u_length(n);
    out.intermediate = scheme.v_length(n) / (Real(4) * u * u);
    out.equal_certified = certainly_equal(out.closed, out.intermediate);
    if (!out.equal_certified && compare(out.closed, out.intermediate) != Verdict::Overlapping)
        throw Error("closed-form lower bound disagrees with v_n / (4 u_n^2)");
    return out;
}

struct BlowupRow {
    int n = 0;
    Real h;
    Real quantity;
    Real v_over_h2;
    Real closed_bound;
    Real pointwise_min;  // lower bound of the integrand on the core v_n
    bool certified = false;
};

enum class BlowupVerdict { Diverges, NotCertified };

inline const char* to_string(BlowupVerdict v) { return v == BlowupVerdict::Diverges ? "Diverges" : "NotCertified"; }

struct DivergenceReport {
    Rational alpha;
    Rational r_variation;  // R(1) - R(0)
    std::vector<BlowupRow> rows;
    std::vector<std::string> notes;
    BlowupVerdict verdict = BlowupVerdict::NotCertified;
};

// Rows n in [n_first, n_last] with n > (R(1) - R(0)) + |alpha| + 1, i.e. R(1) + |alpha| + 1
// under the usual normalization R(0) = 0.
inline DivergenceReport divergence_report(const CounterexampleF& F, const PPoint& x_path, const Rational& alpha,
                                          const MonotoneStep* R, int n_first, int n_last, const Real& tol) {
    const Scheme& scheme = F.scheme();
    if (n_first < 1 || n_last < n_first) throw DomainError("empty rank range");
    if (n_last > scheme.depth_cap()) throw DepthError("rank range exceeds depth_cap");
    DivergenceReport rep;
    rep.alpha = alpha;
    rep.r_variation = R ? R->total_variation() : Rational(0);
    const Rational threshold = rep.r_variation + abs(alpha) + 1;

    bool all = true;
    for (int n = n_first; n <= n_last; ++n) {
        if (Rational(n) <= threshold) {
            rep.notes.push_back("n=" + std::to_string(n) + " skipped: not above R(1)-R(0)+|alpha|+1");
            continue;
        }
        if (x_path.at(static_cast<std::size_t>(n - 1)) != Side::Left) {
            rep.notes.push_back("n=" + std::to_string(n) + " skipped: site not in a Left child");
            continue;
        }
        const BlowupSite site = make_site(scheme, x_path, n);
        BlowupRow row;
        row.n = n;
        row.h = site.h;
        row.quantity = blowup_quantity(F, site, alpha, R, tol);
        row.v_over_h2 = scheme.v_length(n) / (site.h * site.h);
        const LowerBound lb = blowup_lower_bound(scheme, n);
        row.closed_bound = lb.closed;

        // Smallest value of n - (R(y) - R(x)) - alpha (y - x) over the open core.
        const Real& clo = site.u.core.lo;
        const Real& chi = site.u.core.hi;
        const Real r_jump = R ? R->eval(chi) - R->eval(site.x) : Real(0);
        const Real slope_part = max(Real(alpha) * (clo - site.x), Real(alpha) * (chi - site.x));
        row.pointwise_min = Real(n) - r_jump - slope_part;

        const Real& u = scheme.u_length(n);
        row.certified = certainly_greater(row.pointwise_min, Real(1)) && certainly_greater(row.quantity, row.v_over_h2) &&
                        certainly_le(site.h, scheme.residual_length(n) + u) && certainly_less(site.h, Real(2) * u) &&
                        certainly_ge(row.v_over_h2, lb.intermediate) && !certainly_less(lb.intermediate, lb.closed);
        all = all && row.certified;
        rep.rows.push_back(std::move(row));
    }

    // Consecutive closed bounds grow by the factor (4/3)^r.
    bool growing = rep.rows.size() >= 2;
    const Real step = pow_real(Real(make_rational(4, 3)), Real(scheme.r()));
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        if (rep.rows[i].n != rep.rows[i - 1].n + 1) continue;
        const Real ratio = rep.rows[i].closed_bound / rep.rows[i - 1].closed_bound;
        if (!(certainly_equal(ratio, step) || compare(ratio, step) == Verdict::Overlapping)) growing = false;
        if (!certainly_greater(ratio, Real(1))) growing = false;
    }
    rep.verdict = all && growing ? BlowupVerdict::Diverges : BlowupVerdict::NotCertified;
    return rep;
}

} // namespace hkr
