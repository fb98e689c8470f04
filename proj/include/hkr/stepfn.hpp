#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "hkr/error.hpp"
#include "hkr/scalar/real.hpp"
#include "hkr/scheme.hpp"
#include "hkr/series.hpp"

namespace hkr {

// Right-continuous step function on [0,1]: values[i] on [breakpoints[i-1], breakpoints[i]).
class StepFunction {
public:
    StepFunction() : values_{Rational(0)} {}
    StepFunction(std::vector<Rational> breakpoints, std::vector<Rational> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (values_.size() != breakpoints_.size() + 1)
            throw ValidationError("step function needs one more value than breakpoints");
        for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
            if (breakpoints_[i] < 0 || breakpoints_[i] > 1)
                throw ValidationError("breakpoints must lie in [0,1]");
            if (i > 0 && breakpoints_[i] <= breakpoints_[i - 1])
                throw ValidationError("breakpoints must be strictly increasing");
        }
    }
    static StepFunction constant(const Rational& c) { return StepFunction({}, {c}); }

    const std::vector<Rational>& breakpoints() const { return breakpoints_; }
    const std::vector<Rational>& values() const { return values_; }

    const Rational& operator()(const Rational& x) const {
        const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
        return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
    }
    // For an enclosure straddling a breakpoint, joins the neighbouring values.
    Real eval(const Real& x) const {
        if (x.is_exact()) return Real((*this)(x.exact()));
        const Rational& lo = (*this)(x.lower());
        const Rational& hi = (*this)(x.upper());
        if (lo == hi) return Real(lo);
        Rational mn = lo, mx = lo;
        for (std::size_t i = 0; i < breakpoints_.size(); ++i)
            if (breakpoints_[i] > x.lower() && breakpoints_[i] <= x.upper()) {
                mn = std::min(mn, values_[i + 1]);
                mx = std::max(mx, values_[i + 1]);
            }
        return Real::between(Real(mn), Real(mx));
    }

    bool nondecreasing() const {
        for (std::size_t i = 1; i < values_.size(); ++i)
            if (values_[i] < values_[i - 1]) return false;
        return true;
    }
    bool is_zero() const {
        return std::all_of(values_.begin(), values_.end(), [](const Rational& v) { return v == 0; });
    }
    const Rational& first_value() const { return values_.front(); }
    const Rational& last_value() const { return values_.back(); }

    StepFunction scaled(const Rational& k) const {
        StepFunction out = *this;
        for (auto& v : out.values_) v *= k;
        return out;
    }

private:
    std::vector<Rational> breakpoints_;
    std::vector<Rational> values_;
};

class MonotoneStep : public StepFunction {
public:
    MonotoneStep() = default;
    MonotoneStep(std::vector<Rational> breakpoints, std::vector<Rational> values)
        : StepFunction(std::move(breakpoints), std::move(values)) {
        if (!nondecreasing()) throw ValidationError("monotone step values must be nondecreasing");
    }
    Rational total_variation() const { return last_value() - first_value(); }
};

inline Rational eval_monotone(const MonotoneStep& R, const Rational& x) {
    if (x < 0 || x > 1) throw DomainError("eval_monotone: x outside [0,1]");
    return R(x);
}

// Value of F at a point, or the depth at which the descent stopped undecided.
struct FValue {
    long value = 0;
    bool undecided = false;
    int depth = 0;
};

// Truncation certificate: everything carried by cores of rank > rank_cutoff is at most bound.
struct TailBound {
    int rank_cutoff = 0;
    Real bound;
};

// [z]_+^e for e > 0, also for enclosures straddling 0.
inline Real pos_pow(const Real& z, const Rational& e) {
    const int sg = z.certain_sign();
    if (sg > 0) return pow_real(z, Real(e));
    if (z.upper() <= 0) return Real(0);
    return Real::between(Real(0), pow_real(Real(z.upper()), Real(e)));
}

// Integrand [f_sign * F(y) + step(y) + offset + slope * y]_+^s.
struct LinearIntegrand {
    int f_sign = 1;
    StepFunction step;
    Real offset = Real(0);
    Real slope = Real(0);
};

// The counterexample: F = k on every rank-k core, 0 elsewhere (also on core endpoints).
//
// Integration splits the domain into the residual tree. A residual segment of rank m
// contains 2^{k-m-1} cores of rank k > m, so its total core mass weighted by k^s is
//   M_m(s) = (4^r - 2) 2^{-m-1} sum_{k>m} k^s x^k,   x = 2 * 12^{-r},
// and segments lying entirely inside the integration range are summed in one step.
// Caches are per object; share one instance across many integrals of the same s.
class CounterexampleF {
public:
    explicit CounterexampleF(const Scheme& scheme) : scheme_(&scheme) {
        PrecisionScope scope(scheme.params().precision);
        x_ = Real(2) / (scheme.four_r() * scheme.three_r());
        one_minus_x_ = Real(1) - x_;
        numer_ = scheme.four_r() - Real(2);
    }

    const Scheme& scheme() const { return *scheme_; }

    FValue eval(const Real& x, int max_rank) const {
        const Location loc = scheme_->locate(x, max_rank);
        switch (loc.kind) {
        case Location::Kind::InCore: return {loc.rank, false, loc.rank};
        case Location::Kind::UndecidedAtDepth: return {0, true, loc.rank};
        default: return {0, false, loc.rank};
        }
    }
    FValue eval(const Real& x) const { return eval(x, scheme_->depth_cap()); }

    // Mass of |F|^s over cores of rank > m inside one rank-m residual segment.
    Real segment_mass(int m, const Rational& s) const {
        auto& cache = mass_cache_[s];
        if (static_cast<int>(cache.size()) <= m) cache.resize(static_cast<std::size_t>(m) + 1);
        auto& slot = cache[static_cast<std::size_t>(m)];
        if (!slot) slot = shift_mass(m, Real(0), s);
        return *slot;
    }
    // Total length of the cores of rank > m inside one rank-m residual segment.
    Real segment_core_length(int m) const { return k_factor(m) * x_pow(m + 1) / one_minus_x_; }

    TailBound tail_bound(int cutoff, const Rational& s) const {
        return {cutoff, Real(pow_int(Rational(2), cutoff)) * segment_mass(cutoff, s)};
    }

    // Enclosure of int_a^b |F|^s with radius at most tol (exact when the descent ends).
    Real integrate_abs_power(const Real& a, const Real& b, const Rational& s, const Real& tol) const {
        check_range(a, b);
        if (s < 1) throw DomainError("exponent s must be >= 1");
        PrecisionScope scope(scheme_->params().precision);
        const Real out = cumulative(b, s) - cumulative(a, s);
        if (out.width() > tol.upper()) throw DepthError("integrate_abs_power: tolerance unreachable within depth_cap");
        return out;
    }

    // Enclosure of int_a^b [f_sign F(y) + step(y) + offset + slope y]_+^s dy.
    Real integrate_positive_part(const Real& a, const Real& b, const LinearIntegrand& g, const Rational& s,
                                 const Real& tol) const {
        check_range(a, b);
        if (s < 1) throw DomainError("exponent s must be >= 1");
        if (g.f_sign < -1 || g.f_sign > 1) throw DomainError("f_sign must be -1, 0 or 1");
        if (g.slope.certain_sign() == 0 && !(g.slope.is_exact() && g.slope.exact() == 0))
            throw UndecidableError("slope enclosure straddles zero");
        PrecisionScope scope(scheme_->params().precision);
        if (certainly_le(b, a)) return Real(0);

        // Pieces on which the step part is constant.
        std::vector<Real> cuts{a};
        const Real start_value = g.step.eval(a);
        if (!start_value.is_exact()) throw UndecidableError("integration endpoint too close to a step breakpoint");
        std::vector<Rational> vals{start_value.exact()};
        for (std::size_t i = 0; i < g.step.breakpoints().size(); ++i) {
            const Real bp(g.step.breakpoints()[i]);
            if (certainly_le(bp, a) || certainly_le(b, bp)) continue;
            if (!(certainly_less(a, bp) && certainly_less(bp, b)))
                throw UndecidableError("integration endpoint too close to a step breakpoint");
            cuts.push_back(bp);
            vals.push_back(g.step.values()[i + 1]);
        }
        cuts.push_back(b);

        const Real length = b - a;
        Real total(0);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const Real piece_tol = tol * (cuts[i + 1] - cuts[i]) / length;
            total += piece(cuts[i], cuts[i + 1], g.f_sign, Real(vals[i]) + g.offset, g.slope, s, piece_tol);
        }
        if (total.width() > tol.upper()) throw DepthError("integrate_positive_part: tolerance unreachable within depth_cap");
        return total;
    }

    // int_0^h [F(x+t) - (R(x+t) - R(x)) - c - alpha t]_+^s dt.
    Real integrate_plus_linear(const Real& x, const Real& h, const Rational& alpha, const Rational& c,
                               const Rational& s, const MonotoneStep* R, const Real& tol) const {
        if (h.certain_sign() <= 0) throw DomainError("integrate_plus_linear: h must be positive");
        LinearIntegrand g;
        g.f_sign = 1;
        Real rx(0);
        if (R) {
            g.step = R->scaled(Rational(-1));
            rx = R->eval(x);
        }
        g.offset = rx - Real(c) + Real(alpha) * x;
        g.slope = Real(Rational(-alpha));
        return integrate_positive_part(x, x + h, g, s, tol);
    }

private:
    void check_range(const Real& a, const Real& b) const {
        if (certainly_less(a, Real(0)) || certainly_greater(b, Real(1)))
            throw DomainError("integration range must lie in [0,1]");
    }

    Real k_factor(int m) const { return numer_ / Real(pow_int(Rational(2), m + 1)); }
    const Real& x_pow(int k) const {
        while (static_cast<int>(x_pows_.size()) <= k)
            x_pows_.push_back(x_pows_.empty() ? Real(1) : x_pows_.back() * x_);
        return x_pows_[static_cast<std::size_t>(k)];
    }
    Real series_tol() const { return Real(pow_int(Rational(2), -(scheme_->params().precision / 2))); }

    // sum_{k >= from} [k + c]_+^s x^k
    Real shifted_tail(long from, const Real& c, const Rational& s) const {
        long k = from;
        if (c.upper() < -from) k = std::max(from, floor_q(-c.upper()).get_si());
        Real acc(0);
        while ((Real(k) + c).certain_sign() <= 0) {
            acc += pos_pow(Real(k) + c, s) * x_pow(static_cast<int>(k));
            ++k;
        }
        return acc + series::shifted_polygeom_sum(Real(s), c, x_, k, series_tol());
    }

    static Integer floor_q(const Rational& q) {
        Integer out;
        mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
        return out;
    }

    // sum over cores of rank > m in one rank-m segment of [k + c]_+^s - [c]_+^s.
    Real shift_mass(int m, const Real& c, const Rational& s) const {
        return k_factor(m) * (shifted_tail(m + 1, c, s) - pos_pow(c, s) * x_pow(m + 1) / one_minus_x_);
    }
    // Same with -k in place of k: a finite sum since [c - k]_+ vanishes for k >= c.
    Real negative_shift_mass(int m, const Real& c, const Rational& s) const {
        if (c.upper() <= 0) return Real(0);
        Real acc(0);
        for (long k = m + 1; Rational(k) < c.upper(); ++k) acc += pos_pow(c - Real(k), s) * x_pow(static_cast<int>(k));
        return k_factor(m) * (acc - pos_pow(c, s) * x_pow(m + 1) / one_minus_x_);
    }
    Real const_mass(int sign, int m, const Real& c, const Rational& s) const {
        return sign > 0 ? shift_mass(m, c, s) : negative_shift_mass(m, c, s);
    }

    // int_lo^hi [c + slope y]_+^s dy
    static Real linear_piece(const Real& lo, const Real& hi, const Real& c, const Real& slope, const Rational& s) {
        if (slope.is_exact() && slope.exact() == 0) return (hi - lo) * pos_pow(c, s);
        const Rational s1 = s + 1;
        return (pos_pow(c + slope * hi, s1) - pos_pow(c + slope * lo, s1)) / (slope * Real(s1));
    }

    // int_0^y |F|^s, descending along y's address; an undecided tail adds [0, M_m].
    Real cumulative(const Real& y, const Rational& s) const {
        if (y.upper() <= 0) return Real(0);
        Real acc(0);
        Real lo(0), hi(1);
        const int cap = scheme_->depth_cap();
        for (int m = 0;; ++m) {
            if (certainly_equal(y, lo)) return acc;
            if (certainly_equal(y, hi)) return acc + segment_mass(m, s);
            const Real mass = segment_mass(m, s);
            if (m >= cap) return acc + Real::between(Real(0), mass);
            const int n = m + 1;
            const Real ul = lo + scheme_->residual_length(n);
            const Real uh = hi - scheme_->residual_length(n);
            if (certainly_le(y, ul)) {
                hi = ul;
                continue;
            }
            const Real left_mass = segment_mass(n, s);
            const Real core_mass = pow_real(Real(n), Real(s)) * scheme_->v_length(n);
            if (certainly_ge(y, uh)) {
                acc += left_mass + core_mass;
                lo = uh;
                continue;
            }
            if (!(certainly_less(ul, y) && certainly_less(y, uh))) return acc + Real::between(Real(0), mass);
            const Real clo = ul + scheme_->margin(n), chi = uh - scheme_->margin(n);
            const Real inside = max(Real(0), min(y, chi) - clo);
            return acc + left_mass + pow_real(Real(n), Real(s)) * inside;
        }
    }

    // One piece [p, q] on which the integrand is [f_sign F + c + slope y]_+^s.
    Real piece(const Real& p, const Real& q, int f_sign, const Real& c, const Real& slope, const Rational& s,
               const Real& tol) const {
        Real total = linear_piece(p, q, c, slope, s);
        if (f_sign == 0) return total;
        const bool linear = !(slope.is_exact() && slope.exact() == 0);
        const Rational len = q.upper() - p.lower();
        const Rational contained_budget = tol.lower() / 2 / len;  // per unit length
        auto w_at = [&](const Real& y) { return c + slope * y; };

        std::vector<ResidualSegment> stack{scheme_->root()};
        long expansions = 0;
        while (!stack.empty()) {
            const ResidualSegment T = std::move(stack.back());
            stack.pop_back();
            if (certainly_le(T.hi, p) || certainly_le(q, T.lo)) continue;
            const bool contained = certainly_le(p, T.lo) && certainly_le(T.hi, q);
            const int m = T.rank;
            const Real wl = w_at(T.lo), wh = w_at(T.hi);
            const Real wmin = linear && slope.certain_sign() < 0 ? wh : wl;
            const Real wmax = linear && slope.certain_sign() < 0 ? wl : wh;
            if (contained) {
                Real E = aggregate(f_sign, m, c, slope, wmin, wmax, w_at((T.lo + T.hi) / Real(2)), s);
                if (E.width() <= contained_budget * scheme_->residual_length(m).lower()) {
                    total += E;
                    continue;
                }
            } else if (m >= scheme_->depth_cap()) {
                total += Real::between(Real(0), const_mass(f_sign, m, wmax, s));
                continue;
            }
            if (m + 1 > scheme_->depth_cap() || ++expansions > kMaxExpansions)
                throw DepthError("integration tolerance unreachable within depth_cap");
            const RemovedInterval J = scheme_->removed_of(T);
            total += core_piece(J, p, q, f_sign, c, slope, s);
            stack.push_back(scheme_->child(T, Side::Right));
            stack.push_back(scheme_->child(T, Side::Left));
        }
        return total;
    }

    Real core_piece(const RemovedInterval& J, const Real& p, const Real& q, int f_sign, const Real& c,
                    const Real& slope, const Rational& s) const {
        if (certainly_le(J.core.hi, p) || certainly_le(q, J.core.lo)) return Real(0);
        const Real lo = max(J.core.lo, p), hi = min(J.core.hi, q);
        if (certainly_le(hi, lo)) return Real(0);
        const Real shift = Real(f_sign) * Real(J.rank);
        return linear_piece(lo, hi, c + shift, slope, s) - linear_piece(lo, hi, c, slope, s);
    }

    // Core corrections summed over a whole rank-m segment on which w = c + slope y
    // ranges over [wmin, wmax]. Each term is monotone in w, which gives the fallback
    // enclosure; for s = 1 without kinks the sum is exact because the cores of each
    // rank sit symmetrically about the segment midpoint.
    Real aggregate(int f_sign, int m, const Real& c, const Real& slope, const Real& wmin, const Real& wmax,
                   const Real& wmid, const Rational& s) const {
        if (slope.is_exact() && slope.exact() == 0) return const_mass(f_sign, m, c, s);
        if (s == 1) {
            if (f_sign > 0) {
                if (certainly_ge(wmin, Real(0))) return segment_mass(m, s);
                if (certainly_le(wmax, Real(0)) && certainly_ge(Real(m + 1) + wmin, Real(0)))
                    return segment_mass(m, s) + segment_core_length(m) * wmid;
            } else {
                if (certainly_le(wmax, Real(0))) return Real(0);
                if (certainly_ge(wmin, Real(0)) && certainly_le(wmax, Real(m + 1)))
                    return -(segment_core_length(m) * wmid);
            }
        }
        return Real::between(const_mass(f_sign, m, wmin, s), const_mass(f_sign, m, wmax, s));
    }

    static constexpr long kMaxExpansions = 4'000'000;

    const Scheme* scheme_;
    Real x_, one_minus_x_, numer_;
    mutable std::vector<Real> x_pows_;
    mutable std::map<Rational, std::vector<std::optional<Real>>> mass_cache_;
};

// Free-function forms.
inline FValue eval_F(const CounterexampleF& F, const Real& x, int max_rank) { return F.eval(x, max_rank); }

inline Real integrate_abs_power(const CounterexampleF& F, const Real& a, const Real& b, const Rational& s,
                                const Real& tol) {
    return F.integrate_abs_power(a, b, s, tol);
}

inline Real integrate_plus_linear(const CounterexampleF& F, const Real& x, const Real& h, const Rational& alpha,
                                  const Rational& c, const Rational& s, const MonotoneStep* R, const Real& tol) {
    return F.integrate_plus_linear(x, h, alpha, c, s, R, tol);
}

} // namespace hkr
