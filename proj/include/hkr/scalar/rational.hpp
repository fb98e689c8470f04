#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>

#include "hkr/error.hpp"

namespace hkr {

// Exact rational, always kept in lowest terms with a positive denominator.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw DomainError("zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
    return out;
}

// q^e for any integer e (q != 0 when e < 0).
inline Rational pow_int(const Rational& q, long e) {
    if (e < 0) {
        if (q == 0) throw DomainError("zero raised to a negative power");
        return pow_int(Rational(1) / q, -e);
    }
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(e));
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(e));
    Rational out(num, den);
    out.canonicalize();
    return out;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

// Accepts "p", "p/q", and plain decimals such as "-0.125" or "1.5e-3".
// The decimal forms are converted exactly.
inline Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t start = 0;
    while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    s = s.substr(start);
    if (s.empty()) throw ValidationError("empty rational literal");

    auto all_digits = [](std::string_view v) {
        if (v.empty()) return false;
        for (char c : v)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    auto signed_int = [&](std::string_view v) {
        if (!v.empty() && (v[0] == '-' || v[0] == '+')) v.remove_prefix(1);
        return all_digits(v);
    };

    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!signed_int(num) || !all_digits(den))
            throw ValidationError("malformed rational literal: " + s);
        if (num[0] == '+') num.erase(0, 1);
        Integer d(den);
        if (d == 0) throw ValidationError("zero denominator in: " + s);
        Rational q(Integer(num), d);
        q.canonicalize();
        return q;
    }

    std::string mant = s;
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string::npos) {
        std::string ex = s.substr(e + 1);
        if (!signed_int(ex)) throw ValidationError("malformed exponent in: " + s);
        exp10 = std::stol(ex);
        mant = s.substr(0, e);
    }
    bool neg = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
        neg = mant[0] == '-';
        mant.erase(0, 1);
    }
    std::string digits = mant;
    if (auto dot = mant.find('.'); dot != std::string::npos) {
        std::string frac = mant.substr(dot + 1);
        digits = mant.substr(0, dot) + frac;
        exp10 -= static_cast<long>(frac.size());
    }
    if (!all_digits(digits)) throw ValidationError("malformed number: " + s);
    Rational q{Integer(digits)};
    q *= pow_int(Rational(10), exp10);
    return neg ? Rational(-q) : q;
}

// Serializes as "p/q" with q > 0, also for integers ("4/1").
inline std::string to_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace hkr
