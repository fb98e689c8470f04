#pragma once

#include <mpfr.h>

#include <algorithm>
#include <array>
#include <string>
#include <utility>

#include "hkr/error.hpp"
#include "hkr/scalar/rational.hpp"

namespace hkr {

// Owning wrapper around an mpfr_t.
class BigFloat {
public:
    explicit BigFloat(mpfr_prec_t prec = 64) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    BigFloat(const BigFloat& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    BigFloat(BigFloat&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    BigFloat& operator=(const BigFloat& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    BigFloat& operator=(BigFloat&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~BigFloat() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    Rational to_rational() const {
        Rational q;
        mpfr_get_q(q.get_mpq_t(), v_);
        return q;
    }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

private:
    mpfr_t v_;
};

// Closed interval [lo, hi] with endpoints rounded outward on every operation.
class Interval {
public:
    explicit Interval(mpfr_prec_t prec = 256) : lo_(prec), hi_(prec) {}

    static Interval from(const Rational& q, mpfr_prec_t prec) {
        Interval out(prec);
        mpfr_set_q(out.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(out.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        return out;
    }
    static Interval hull(const Rational& a, const Rational& b, mpfr_prec_t prec) {
        const Rational& lo = a < b ? a : b;
        const Rational& hi = a < b ? b : a;
        Interval out(prec);
        mpfr_set_q(out.lo_.get(), lo.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(out.hi_.get(), hi.get_mpq_t(), MPFR_RNDU);
        return out;
    }

    const BigFloat& lo() const { return lo_; }
    const BigFloat& hi() const { return hi_; }
    mpfr_prec_t prec() const { return std::max(lo_.prec(), hi_.prec()); }

    Rational lower() const { return lo_.to_rational(); }
    Rational upper() const { return hi_.to_rational(); }
    bool contains(const Rational& q) const { return lower() <= q && q <= upper(); }
    bool contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }
    int certain_sign() const {
        if (mpfr_sgn(lo_.get()) > 0) return 1;
        if (mpfr_sgn(hi_.get()) < 0) return -1;
        return 0;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec(), b.prec()));
        mpfr_add(out.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(out.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return out;
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec(), b.prec()));
        mpfr_sub(out.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(out.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        return out;
    }
    friend Interval operator-(const Interval& a) {
        Interval out(a.prec());
        mpfr_neg(out.lo_.get(), a.hi_.get(), MPFR_RNDD);
        mpfr_neg(out.hi_.get(), a.lo_.get(), MPFR_RNDU);
        return out;
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        return corners(a, b, mpfr_mul);
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) throw DomainError("interval division by an enclosure of zero");
        return corners(a, b, mpfr_div);
    }

    // x^e for integer e; x must exclude 0 when e < 0.
    Interval pow_int(long e) const {
        if (e == 0) return from(Rational(1), prec());
        if (e < 0) return from(Rational(1), prec()) / pow_int(-e);
        Interval out(prec());
        const bool even = (e % 2) == 0;
        if (mpfr_sgn(lo_.get()) >= 0) {
            mpfr_pow_si(out.lo_.get(), lo_.get(), e, MPFR_RNDD);
            mpfr_pow_si(out.hi_.get(), hi_.get(), e, MPFR_RNDU);
        } else if (mpfr_sgn(hi_.get()) <= 0) {
            if (even) {
                mpfr_pow_si(out.lo_.get(), hi_.get(), e, MPFR_RNDD);
                mpfr_pow_si(out.hi_.get(), lo_.get(), e, MPFR_RNDU);
            } else {
                mpfr_pow_si(out.lo_.get(), lo_.get(), e, MPFR_RNDD);
                mpfr_pow_si(out.hi_.get(), hi_.get(), e, MPFR_RNDU);
            }
        } else if (even) {
            BigFloat a(prec()), b(prec());
            mpfr_pow_si(a.get(), lo_.get(), e, MPFR_RNDU);
            mpfr_pow_si(b.get(), hi_.get(), e, MPFR_RNDU);
            mpfr_set_zero(out.lo_.get(), 1);
            mpfr_max(out.hi_.get(), a.get(), b.get(), MPFR_RNDU);
        } else {
            mpfr_pow_si(out.lo_.get(), lo_.get(), e, MPFR_RNDD);
            mpfr_pow_si(out.hi_.get(), hi_.get(), e, MPFR_RNDU);
        }
        return out;
    }

    // base^exponent for a base enclosure strictly above zero.
    static Interval pow(const Interval& base, const Interval& exponent) {
        if (mpfr_sgn(base.lo_.get()) <= 0) throw DomainError("pow_real: base enclosure not positive");
        return corners(base, exponent, mpfr_pow);
    }

    Interval log2() const {
        if (mpfr_sgn(lo_.get()) <= 0) throw DomainError("log2 of a nonpositive enclosure");
        Interval out(prec());
        mpfr_log2(out.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_log2(out.hi_.get(), hi_.get(), MPFR_RNDU);
        return out;
    }

    static Interval min(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec(), b.prec()));
        mpfr_min(out.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_min(out.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return out;
    }
    static Interval max(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec(), b.prec()));
        mpfr_max(out.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_max(out.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return out;
    }
    // Convex hull of two enclosures.
    static Interval join(const Interval& a, const Interval& b) {
        Interval out(std::max(a.prec(), b.prec()));
        mpfr_min(out.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_max(out.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return out;
    }

    bool certainly_less(const Interval& o) const { return mpfr_less_p(hi_.get(), o.lo_.get()); }
    bool certainly_le(const Interval& o) const { return mpfr_lessequal_p(hi_.get(), o.lo_.get()); }

private:
    using BinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

    // For operations monotone in each argument separately, the extremes sit at corners.
    static Interval corners(const Interval& a, const Interval& b, BinOp op) {
        const mpfr_prec_t p = std::max(a.prec(), b.prec());
        Interval out(p);
        BigFloat t(p);
        const std::array<std::pair<const BigFloat*, const BigFloat*>, 4> cs{{
            {&a.lo_, &b.lo_}, {&a.lo_, &b.hi_}, {&a.hi_, &b.lo_}, {&a.hi_, &b.hi_}}};
        bool first = true;
        for (auto [x, y] : cs) {
            op(t.get(), x->get(), y->get(), MPFR_RNDD);
            if (first || mpfr_less_p(t.get(), out.lo_.get())) mpfr_set(out.lo_.get(), t.get(), MPFR_RNDD);
            op(t.get(), x->get(), y->get(), MPFR_RNDU);
            if (first || mpfr_greater_p(t.get(), out.hi_.get())) mpfr_set(out.hi_.get(), t.get(), MPFR_RNDU);
            first = false;
        }
        return out;
    }

    BigFloat lo_;
    BigFloat hi_;
};

} // namespace hkr
