#pragma once

#include <mpfr.h>

#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "hkr/error.hpp"
#include "hkr/scalar/interval.hpp"
#include "hkr/scalar/rational.hpp"

namespace hkr {

namespace detail {
inline mpfr_prec_t& precision_slot() {
    thread_local mpfr_prec_t bits = 256;
    return bits;
}
} // namespace detail

// Working precision used whenever an exact value must be turned into an enclosure.
inline mpfr_prec_t default_precision() { return detail::precision_slot(); }

class PrecisionScope {
public:
    explicit PrecisionScope(mpfr_prec_t bits) : saved_(detail::precision_slot()) {
        if (bits < MPFR_PREC_MIN) throw DomainError("precision too small");
        detail::precision_slot() = bits;
    }
    ~PrecisionScope() { detail::precision_slot() = saved_; }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    mpfr_prec_t saved_;
};

enum class Verdict { CertainlyLess, CertainlyGreater, Overlapping };

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::CertainlyLess: return "CertainlyLess";
    case Verdict::CertainlyGreater: return "CertainlyGreater";
    case Verdict::Overlapping: return "Overlapping";
    }
    return "?";
}

// A certified real: either an exact rational, or an interval known to contain the value.
// Arithmetic stays exact while both operands are exact and the operation is rational.
class Real {
public:
    Real() : v_(Rational(0)) {}
    Real(const Rational& q) : v_(q) {}          // NOLINT(google-explicit-constructor)
    Real(Rational&& q) : v_(std::move(q)) {}    // NOLINT(google-explicit-constructor)
    Real(long n) : v_(Rational(n)) {}           // NOLINT(google-explicit-constructor)
    Real(int n) : v_(Rational(n)) {}            // NOLINT(google-explicit-constructor)
    explicit Real(Interval iv) : v_(std::move(iv)) {}

    static Real parse(std::string_view text) { return Real(parse_rational(text)); }

    bool is_exact() const { return std::holds_alternative<Rational>(v_); }
    const Rational& exact() const {
        if (!is_exact()) throw DomainError("value is an enclosure, not exact");
        return std::get<Rational>(v_);
    }
    Interval enclosure(mpfr_prec_t prec = 0) const {
        if (is_exact()) return Interval::from(std::get<Rational>(v_), prec ? prec : default_precision());
        return std::get<Interval>(v_);
    }
    mpfr_prec_t prec() const { return is_exact() ? 0 : std::get<Interval>(v_).prec(); }

    // Exact rational bounds of the enclosure.
    Rational lower() const { return is_exact() ? exact() : std::get<Interval>(v_).lower(); }
    Rational upper() const { return is_exact() ? exact() : std::get<Interval>(v_).upper(); }
    double approx() const {
        if (is_exact()) return exact().get_d();
        const auto& iv = std::get<Interval>(v_);
        return 0.5 * (iv.lo().to_double() + iv.hi().to_double());
    }
    Rational width() const { return upper() - lower(); }

    // Sign when certain, 0 when the enclosure touches zero (or the value is 0).
    int certain_sign() const {
        if (is_exact()) return sgn(exact());
        return std::get<Interval>(v_).certain_sign();
    }

    Real operator-() const {
        if (is_exact()) return Real(Rational(-exact()));
        return Real(-std::get<Interval>(v_));
    }
    friend Real operator+(const Real& a, const Real& b) {
        if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() + b.exact()));
        auto [x, y] = promote(a, b);
        return Real(x + y);
    }
    friend Real operator-(const Real& a, const Real& b) {
        if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() - b.exact()));
        auto [x, y] = promote(a, b);
        return Real(x - y);
    }
    friend Real operator*(const Real& a, const Real& b) {
        if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() * b.exact()));
        if (a.is_exact() && a.exact() == 0) return Real(0);
        if (b.is_exact() && b.exact() == 0) return Real(0);
        auto [x, y] = promote(a, b);
        return Real(x * y);
    }
    friend Real operator/(const Real& a, const Real& b) {
        if (b.is_exact() && b.exact() == 0) throw DomainError("division by zero");
        if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() / b.exact()));
        auto [x, y] = promote(a, b);
        return Real(x / y);
    }
    Real& operator+=(const Real& o) { return *this = *this + o; }
    Real& operator-=(const Real& o) { return *this = *this - o; }
    Real& operator*=(const Real& o) { return *this = *this * o; }
    Real& operator/=(const Real& o) { return *this = *this / o; }

    Real pow_int(long e) const {
        if (is_exact()) return Real(hkr::pow_int(exact(), e));
        return Real(std::get<Interval>(v_).pow_int(e));
    }

    friend Real min(const Real& a, const Real& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() <= b.exact() ? a : b;
        auto [x, y] = promote(a, b);
        return Real(Interval::min(x, y));
    }
    friend Real max(const Real& a, const Real& b) {
        if (a.is_exact() && b.is_exact()) return a.exact() >= b.exact() ? a : b;
        auto [x, y] = promote(a, b);
        return Real(Interval::max(x, y));
    }
    // Enclosure of both values (exact only if they coincide).
    friend Real join(const Real& a, const Real& b) {
        if (a.is_exact() && b.is_exact() && a.exact() == b.exact()) return a;
        auto [x, y] = promote(a, b);
        return Real(Interval::join(x, y));
    }
    // The enclosure [lo, hi] of a value known only to lie between two bounds.
    static Real between(const Real& lo, const Real& hi) { return join(lo, hi); }

    // Decimal rendering: lower bound rounded down, upper bound rounded up.
    std::string decimal_lower(int digits = 20) const { return render(lower(), digits, 'D'); }
    std::string decimal_upper(int digits = 20) const { return render(upper(), digits, 'U'); }

    // Center/radius decimal strings such that [center - radius, center + radius]
    // contains the enclosure.
    std::pair<std::string, std::string> center_radius() const {
        const mpfr_prec_t bits = is_exact() ? default_precision() : prec();
        const int digits = static_cast<int>(std::ceil(static_cast<double>(bits) * 0.30103)) + 2;
        Rational lo = lower(), hi = upper();
        Rational mid = (lo + hi) / 2;
        std::string c = render(mid, digits, 'N');
        Rational cq = parse_rational(c);
        Rational rad = max_rat(hi - cq, cq - lo);
        return {c, rad == 0 ? "0" : render(rad, 17, 'U')};
    }

private:
    static int sgn(const Rational& q) { return ::sgn(q); }
    static Rational max_rat(const Rational& a, const Rational& b) { return a < b ? b : a; }

    static std::pair<Interval, Interval> promote(const Real& a, const Real& b) {
        mpfr_prec_t p = std::max(a.prec(), b.prec());
        if (p == 0) p = default_precision();
        return {a.enclosure(p), b.enclosure(p)};
    }

    static std::string render(const Rational& q, int digits, char mode) {
        if (q == 0) return "0";
        BigFloat f(static_cast<mpfr_prec_t>(digits * 4 + 64));
        const mpfr_rnd_t rnd = mode == 'D' ? MPFR_RNDD : mode == 'U' ? MPFR_RNDU : MPFR_RNDN;
        mpfr_set_q(f.get(), q.get_mpq_t(), rnd);
        char* buf = nullptr;
        const std::string fmt = std::string("%.*R") + mode + "e";
        mpfr_asprintf(&buf, fmt.c_str(), digits - 1, f.get());
        std::string out(buf);
        mpfr_free_str(buf);
        return out;
    }

    std::variant<Rational, Interval> v_;
};

using CertifiedValue = Real;

// Interval enclosures never certify equality, so equal exact values also report Overlapping.
inline Verdict compare(const Real& a, const Real& b) {
    if (a.is_exact() && b.is_exact()) {
        const int c = cmp(a.exact(), b.exact());
        return c < 0 ? Verdict::CertainlyLess : c > 0 ? Verdict::CertainlyGreater : Verdict::Overlapping;
    }
    if (a.upper() < b.lower()) return Verdict::CertainlyLess;
    if (a.lower() > b.upper()) return Verdict::CertainlyGreater;
    return Verdict::Overlapping;
}

inline bool certainly_less(const Real& a, const Real& b) { return compare(a, b) == Verdict::CertainlyLess; }
inline bool certainly_greater(const Real& a, const Real& b) { return compare(a, b) == Verdict::CertainlyGreater; }
// a <= b for every pair of values in the enclosures (exact equality qualifies).
inline bool certainly_le(const Real& a, const Real& b) { return a.upper() <= b.lower(); }
inline bool certainly_ge(const Real& a, const Real& b) { return certainly_le(b, a); }
inline bool certainly_equal(const Real& a, const Real& b) {
    return a.is_exact() && b.is_exact() && a.exact() == b.exact();
}

// base^exponent with an outward-rounded enclosure; exact when the exponent is an
// exact integer and the base is exact.
inline Real pow_real(const Real& base, const Real& exponent) {
    if (base.certain_sign() <= 0) throw DomainError("pow_real: base must be positive");
    if (exponent.is_exact() && is_integer(exponent.exact()) && exponent.exact().get_num().fits_slong_p())
        return base.pow_int(exponent.exact().get_num().get_si());
    mpfr_prec_t p = std::max(base.prec(), exponent.prec());
    if (p == 0) p = default_precision();
    return Real(Interval::pow(base.enclosure(p), exponent.enclosure(p)));
}

inline Real log2_real(const Real& x) {
    mpfr_prec_t p = x.prec() ? x.prec() : default_precision();
    return Real(x.enclosure(p).log2());
}

// Runs `attempt` at doubling precision until it yields a value, or throws
// UndecidableError once the cap is exceeded.
template <class F>
auto with_escalation(F&& attempt, mpfr_prec_t start, mpfr_prec_t cap)
    -> typename std::invoke_result_t<F&, mpfr_prec_t>::value_type {
    for (mpfr_prec_t p = start; p <= cap; p *= 2) {
        PrecisionScope scope(p);
        if (auto out = attempt(p)) return *out;
    }
    throw UndecidableError("comparison undecidable up to " + std::to_string(cap) + " bits");
}

} // namespace hkr
