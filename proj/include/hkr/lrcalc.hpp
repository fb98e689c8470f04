#pragma once

#include <optional>
#include <vector>

#include "hkr/error.hpp"
#include "hkr/scalar/real.hpp"
#include "hkr/stepfn.hpp"

namespace hkr {

// G = F + step, or just the step part when F is absent.
struct ProbeFunction {
    const CounterexampleF* F = nullptr;
    StepFunction step;

    static ProbeFunction counterexample(const CounterexampleF& f) { return {&f, StepFunction()}; }
    static ProbeFunction step_only(StepFunction s) { return {nullptr, std::move(s)}; }

    Real value(const Real& x) const {
        Real out = step.eval(x);
        if (F) {
            const FValue fv = F->eval(x);
            if (fv.undecided) throw UndecidableError("F(x) undecided at depth " + std::to_string(fv.depth));
            out += Real(fv.value);
        }
        return out;
    }
};

struct MeanProbe {
    Real x;
    Real h;
    Rational alpha = 0;
    Rational r = 1;
    // G(x) when already known, e.g. for a certified point of P where F vanishes.
    std::optional<Real> value_at_x = std::nullopt;
};

enum class Derivate { UpperRight, LowerRight, UpperLeft, LowerLeft };

namespace detail {

inline std::optional<Integer> exact_root(const Integer& v, unsigned long n) {
    Integer out;
    if (mpz_root(out.get_mpz_t(), v.get_mpz_t(), n) == 0) return std::nullopt;
    return out;
}

// v^{1/r}; exact when v is an exact perfect power.
inline Real root(const Real& v, const Rational& r) {
    if (r == 1) return v;
    if (v.is_exact()) {
        if (v.exact() == 0) return Real(0);
        if (is_integer(r) && v.exact() > 0 && r.get_num().fits_ulong_p()) {
            const unsigned long n = r.get_num().get_ui();
            auto num = exact_root(v.exact().get_num(), n), den = exact_root(v.exact().get_den(), n);
            if (num && den) return Real(Rational(*num, *den));
        }
    }
    return pos_pow(v, Rational(1 / r));
}

inline Real value_at(const ProbeFunction& G, const MeanProbe& p) {
    return p.value_at_x ? *p.value_at_x : G.value(p.x);
}

// [sign (G(y) - G(x) - alpha (y - x))]_+ as a LinearIntegrand.
inline LinearIntegrand shifted(const ProbeFunction& G, const Real& gx, const Real& x, const Rational& alpha, int sign) {
    LinearIntegrand g;
    g.f_sign = G.F ? sign : 0;
    g.step = G.step.scaled(Rational(sign));
    g.offset = Real(sign) * (Real(alpha) * x - gx);
    g.slope = Real(Rational(-sign * alpha));
    return g;
}

inline Real integrate(const ProbeFunction& G, const Real& a, const Real& b, const LinearIntegrand& g,
                      const Rational& s, const Real& tol) {
    if (G.F) return G.F->integrate_positive_part(a, b, g, s, tol);
    // Without F the scheme is irrelevant; any instance integrates the step part.
    static const Scheme trivial(SchemeParams{Rational(1), 64, 1});
    static const CounterexampleF unused(trivial);
    return unused.integrate_positive_part(a, b, g, s, tol);
}

inline void check_probe(const MeanProbe& p) {
    if (p.h.certain_sign() <= 0) throw DomainError("probe radius h must be positive");
    if (p.r < 1) throw DomainError("exponent r must be >= 1");
    if (certainly_less(p.x, Real(0)) || certainly_greater(p.x, Real(1))) throw DomainError("probe point outside [0,1]");
}

} // namespace detail

// ((1/h) int_{-h}^{h} |G(x+t) - G(x) - alpha t|^r dt)^{1/r}, with the range clipped to [0,1].
inline Real lr_mean(const ProbeFunction& G, const MeanProbe& p, const Real& tol) {
    detail::check_probe(p);
    const Real gx = detail::value_at(G, p);
    const Real a = max(Real(0), p.x - p.h), b = min(Real(1), p.x + p.h);
    const Real up = detail::integrate(G, a, b, detail::shifted(G, gx, p.x, p.alpha, 1), p.r, tol / Real(2));
    const Real down = detail::integrate(G, a, b, detail::shifted(G, gx, p.x, p.alpha, -1), p.r, tol / Real(2));
    return detail::root((up + down) / p.h, p.r);
}

inline Real continuity_modulus(const ProbeFunction& G, const Real& x, const Real& h, const Rational& r,
                               const Real& tol, std::optional<Real> value_at_x = std::nullopt) {
    return lr_mean(G, MeanProbe{x, h, 0, r, std::move(value_at_x)}, tol);
}

// One-sided positive-part mean of the derivate conditions: for UpperRight,
// ((1/h) int_0^h [G(x+t) - G(x) - alpha t]_+^r dt)^{1/r}, and the sign/side flipped for the others.
inline Real derivate_probe(const ProbeFunction& G, const MeanProbe& p, Derivate kind, const Real& tol) {
    detail::check_probe(p);
    const bool right = kind == Derivate::UpperRight || kind == Derivate::LowerRight;
    const int sign = (kind == Derivate::UpperRight || kind == Derivate::LowerLeft) ? 1 : -1;
    if (right && !certainly_le(p.x + p.h, Real(1))) throw DomainError("right probe needs x + h <= 1");
    if (!right && !certainly_ge(p.x - p.h, Real(0))) throw DomainError("left probe needs x - h >= 0");
    const Real gx = detail::value_at(G, p);
    const Real a = right ? p.x : p.x - p.h, b = right ? p.x + p.h : p.x;
    const Real v = detail::integrate(G, a, b, detail::shifted(G, gx, p.x, p.alpha, sign), p.r, tol);
    return detail::root(v / p.h, p.r);
}

inline Real derivate_probe_upper_right(const ProbeFunction& G, const MeanProbe& p, const Real& tol) {
    return derivate_probe(G, p, Derivate::UpperRight, tol);
}

enum class DecayVerdict { ConsistentWith_o_h, Violates_o_h, Inconclusive };

inline const char* to_string(DecayVerdict v) {
    switch (v) {
    case DecayVerdict::ConsistentWith_o_h: return "ConsistentWith_o_h";
    case DecayVerdict::Violates_o_h: return "Violates_o_h";
    case DecayVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct DecaySeries {
    std::vector<Real> h_values;
    std::vector<Real> means;
    std::vector<Real> quotients;  // mean / h
    DecayVerdict verdict = DecayVerdict::Inconclusive;
    std::optional<std::size_t> witness;  // index of the first h with quotient certainly above the floor
};

// h_n = r_{n-1} - r_n for n = first .. first + count - 1: the distance from a left
// endpoint of a rank-(n-1) segment to the far end of its rank-n removed interval.
inline std::vector<Real> construction_schedule(const Scheme& scheme, int first, int count) {
    if (first < 1 || count < 1) throw DomainError("schedule needs first >= 1 and count >= 1");
    std::vector<Real> out;
    for (int n = first; n < first + count; ++n)
        out.push_back(scheme.residual_length(n - 1) - scheme.residual_length(n));
    return out;
}

// Evaluates mean/h along a decreasing schedule. A finite scan can refute o(h) but
// never prove it, so the positive outcome is only "consistent".
inline DecaySeries decay_scan(const ProbeFunction& G, const Real& x, const Rational& alpha, const Rational& r,
                              const std::vector<Real>& schedule, const Rational& floor, const Real& tol,
                              std::optional<Real> value_at_x = std::nullopt) {
    if (schedule.size() < 8) throw DomainError("decay_scan needs at least 8 radii");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!certainly_less(schedule[i], schedule[i - 1])) throw DomainError("schedule must be strictly decreasing");
    if (floor <= 0) throw DomainError("floor must be positive");
    if (!value_at_x) value_at_x = G.value(x);

    DecaySeries out;
    for (const Real& h : schedule) {
        const Real mean = lr_mean(G, MeanProbe{x, h, alpha, r, value_at_x}, tol);
        out.h_values.push_back(h);
        out.quotients.push_back(mean / h);
        out.means.push_back(mean);
    }
    for (std::size_t i = 0; i < out.quotients.size(); ++i)
        if (out.quotients[i].lower() > floor) {
            out.verdict = DecayVerdict::Violates_o_h;
            out.witness = i;
            return out;
        }
    bool decreasing = true;
    for (std::size_t i = 1; i < out.quotients.size(); ++i)
        if (out.quotients[i].upper() > out.quotients[i - 1].upper()) decreasing = false;
    out.verdict = decreasing && out.quotients.back().upper() < floor ? DecayVerdict::ConsistentWith_o_h
                                                                     : DecayVerdict::Inconclusive;
    return out;
}

} // namespace hkr
