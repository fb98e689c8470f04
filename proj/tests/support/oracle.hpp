#pragma once

// Brute-force references built directly from the construction's formulas, without
// going through the library's scheme or integrator.

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <vector>

namespace oracle {

struct Core {
    long rank;
    mpq_class lo, hi;
};

inline mpq_class qpow(mpq_class b, long e) {
    mpq_class out = 1;
    for (long i = 0; i < e; ++i) out *= b;
    return out;
}

// All cores of rank <= max_rank for integer r, in increasing order.
inline std::vector<Core> cores(long r, long max_rank) {
    const mpq_class four_r = qpow(4, r), three_r = qpow(3, r);
    std::vector<Core> out;
    std::function<void(mpq_class, long)> walk = [&](mpq_class lo, long m) {
        if (m >= max_rank) return;
        const mpq_class len = 1 / qpow(four_r, m);
        const mpq_class child = len / four_r;
        const mpq_class u = (four_r - 2) / qpow(four_r, m + 1);
        const mpq_class v = u / qpow(three_r, m + 1);
        const mpq_class mid = lo + len / 2;
        walk(lo, m + 1);
        out.push_back({m + 1, mid - v / 2, mid + v / 2});
        walk(lo + len - child, m + 1);
    };
    walk(0, 0);
    return out;
}

// Global mass of k^s over cores of rank > K, bounded above by summing terms until they
// fall below 1e-40 and then doubling the last one (terms decay faster than 1/2).
inline mpq_class tail_mass(long r, long K, long s, long extra_weight = 0) {
    const mpq_class four_r = qpow(4, r), three_r = qpow(3, r);
    mpq_class acc = 0;
    mpq_class last = 0;
    for (long k = K + 1; k < K + 400; ++k) {
        const mpq_class v = (four_r - 2) / qpow(four_r, k) / qpow(three_r, k);
        last = qpow(k + extra_weight, s) * qpow(2, k - 1) * v;
        acc += last;
        if (last < mpq_class(1, 1) / qpow(10, 40)) break;
    }
    return acc + 2 * last;
}

// [z]_+^s antiderivative helper for integer s: int_lo^hi [c + slope y]_+^s dy.
inline mpq_class linear_piece(const mpq_class& lo, const mpq_class& hi, const mpq_class& c, const mpq_class& slope,
                              long s) {
    auto pos = [&](const mpq_class& z, long e) { return z > 0 ? qpow(z, e) : mpq_class(0); };
    if (slope == 0) return (hi - lo) * pos(c, s);
    return (pos(c + slope * hi, s + 1) - pos(c + slope * lo, s + 1)) / (slope * (s + 1));
}

struct Enclosure {
    mpq_class lo, hi;
};

// int_a^b [sign F(y) + step(y) + offset + slope y]_+^s with cores of rank <= K resolved
// and the rest bounded. step is given as sorted breakpoints and values (right-continuous).
inline Enclosure positive_part(long r, long K, const mpq_class& a, const mpq_class& b, int sign,
                               const std::vector<mpq_class>& bps, const std::vector<mpq_class>& vals,
                               const mpq_class& offset, const mpq_class& slope, long s) {
    const auto cs = cores(r, K);
    std::vector<mpq_class> points{a, b};
    for (const auto& c : cs) {
        if (c.lo > a && c.lo < b) points.push_back(c.lo);
        if (c.hi > a && c.hi < b) points.push_back(c.hi);
    }
    for (const auto& p : bps)
        if (p > a && p < b) points.push_back(p);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());

    auto F_on = [&](const mpq_class& mid) -> long {
        auto it = std::upper_bound(cs.begin(), cs.end(), mid, [](const mpq_class& x, const Core& c) { return x < c.lo; });
        if (it == cs.begin()) return 0;
        --it;
        return (mid > it->lo && mid < it->hi) ? it->rank : 0;
    };
    auto step_at = [&](const mpq_class& mid) {
        std::size_t i = static_cast<std::size_t>(std::upper_bound(bps.begin(), bps.end(), mid) - bps.begin());
        return vals.empty() ? mpq_class(0) : vals[i];
    };

    mpq_class acc = 0;
    mpq_class wmax = 0;
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const mpq_class mid = (points[i] + points[i + 1]) / 2;
        const mpq_class c = mpq_class(sign * F_on(mid)) + step_at(mid) + offset;
        acc += linear_piece(points[i], points[i + 1], c, slope, s);
        for (const mpq_class& y : {points[i], points[i + 1]}) {
            mpq_class w = step_at(mid) + offset + slope * y;
            if (w < 0) w = -w;
            if (w > wmax) wmax = w;
        }
    }
    // Unresolved cores change the integrand by at most (k + wmax)^s - 0 on a set of
    // measure 2^{k-1} v_k at each rank k > K.
    if (sign == 0) return {acc, acc};
    long extra = 0;
    while (extra < wmax) ++extra;
    const mpq_class t = tail_mass(r, K, s, extra);
    return {acc - t, acc + t};
}

inline Enclosure abs_power(long r, long K, const mpq_class& a, const mpq_class& b, long s) {
    mpq_class acc = 0;
    for (const auto& c : cores(r, K)) {
        const mpq_class lo = std::max(c.lo, a), hi = std::min(c.hi, b);
        if (hi > lo) acc += qpow(c.rank, s) * (hi - lo);
    }
    return {acc, acc + tail_mass(r, K, s)};
}

struct Removed {
    long rank;
    mpq_class lo, hi, core_lo, core_hi;
};

// Removed intervals of rank <= max_rank, recovered from their cores.
inline std::vector<Removed> removed(long r, long max_rank) {
    std::vector<Removed> out;
    for (const auto& c : cores(r, max_rank)) {
        const mpq_class u = (qpow(4, r) - 2) / qpow(qpow(4, r), c.rank);
        const mpq_class mid = (c.lo + c.hi) / 2;
        out.push_back({c.rank, mid - u / 2, mid + u / 2, c.lo, c.hi});
    }
    return out;
}

// Partial sums of 3^{1/r} sum_{k>n} k (2/3)^k up to k = terms, for r in {1, 2}: returns
// the sum without the 3^{1/r} factor.
inline long double selection_tail(long n, long terms = 10000) {
    long double acc = 0, p = 1;
    for (long k = 1; k <= terms; ++k) {
        p *= 2.0L / 3.0L;
        if (k > n) acc += static_cast<long double>(k) * p;
    }
    return acc;
}

} // namespace oracle
