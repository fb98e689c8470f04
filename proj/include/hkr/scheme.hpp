#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hkr/error.hpp"
#include "hkr/scalar/real.hpp"

namespace hkr {

enum class Side : char { Left = 'L', Right = 'R' };

// Address of a residual segment: the sequence of Left/Right choices taken from [0,1].
// A path of length n addresses a rank-n residual segment and the rank-(n+1) removed
// interval concentric with it.
class DescentPath {
public:
    DescentPath() = default;
    explicit DescentPath(std::vector<Side> bits) : bits_(std::move(bits)) {}

    static DescentPath parse(std::string_view text) {
        std::vector<Side> bits;
        bits.reserve(text.size());
        for (char c : text) {
            if (c == 'L') bits.push_back(Side::Left);
            else if (c == 'R') bits.push_back(Side::Right);
            else throw ValidationError("descent path may only contain L and R: " + std::string(text));
        }
        return DescentPath(std::move(bits));
    }

    std::string str() const {
        std::string s;
        s.reserve(bits_.size());
        for (Side b : bits_) s.push_back(static_cast<char>(b));
        return s;
    }

    std::size_t size() const { return bits_.size(); }
    bool empty() const { return bits_.empty(); }
    Side operator[](std::size_t i) const { return bits_.at(i); }
    const std::vector<Side>& bits() const { return bits_; }

    DescentPath child(Side s) const {
        DescentPath out = *this;
        out.bits_.push_back(s);
        return out;
    }
    DescentPath prefix(std::size_t n) const {
        return DescentPath(std::vector<Side>(bits_.begin(), bits_.begin() + static_cast<long>(std::min(n, bits_.size()))));
    }

    friend bool operator==(const DescentPath&, const DescentPath&) = default;

private:
    std::vector<Side> bits_;
};

// A point of P given by an eventually periodic infinite descent: `prefix`
// followed by `period` repeated forever. Left endpoints of residual segments
// are path + (L), right endpoints path + (R). Text form "LRL(RL)"; a string
// without parentheses denotes the pure period.
struct PPoint {
    DescentPath prefix;
    DescentPath period;

    static PPoint left_endpoint(const DescentPath& p) { return {p, DescentPath::parse("L")}; }
    static PPoint right_endpoint(const DescentPath& p) { return {p, DescentPath::parse("R")}; }

    static PPoint parse(std::string_view text) {
        const auto open = text.find('(');
        if (open == std::string_view::npos) {
            auto period = DescentPath::parse(text);
            if (period.empty()) throw ValidationError("empty period in P-point");
            return {DescentPath(), std::move(period)};
        }
        if (text.back() != ')') throw ValidationError("P-point period must close with ')': " + std::string(text));
        auto prefix = DescentPath::parse(text.substr(0, open));
        auto period = DescentPath::parse(text.substr(open + 1, text.size() - open - 2));
        if (period.empty()) throw ValidationError("empty period in P-point");
        return {std::move(prefix), std::move(period)};
    }

    std::string str() const { return prefix.str() + "(" + period.str() + ")"; }

    // Symbol at 0-based position i of the infinite path.
    Side at(std::size_t i) const {
        if (i < prefix.size()) return prefix[i];
        return period[(i - prefix.size()) % period.size()];
    }
    DescentPath path_prefix(std::size_t n) const {
        std::vector<Side> bits;
        bits.reserve(n);
        for (std::size_t i = 0; i < n; ++i) bits.push_back(at(i));
        return DescentPath(std::move(bits));
    }
};

struct SchemeParams {
    Rational r{1};
    mpfr_prec_t precision = 256;
    int depth_cap = 64;
};

struct ResidualSegment {
    int rank = 0;
    DescentPath path;
    Real lo, hi;
};

struct CoreInterval {
    int rank = 0;
    Real lo, hi;  // open
};

// Open rank-n interval removed from the residual segment at `path` (|path| = n - 1).
struct RemovedInterval {
    int rank = 0;
    DescentPath path;
    Real lo, hi;
    CoreInterval core;
};

struct Location {
    enum class Kind { InCore, InMarginOfRemoved, InPCertified, UndecidedAtDepth };
    Kind kind = Kind::UndecidedAtDepth;
    int rank = 0;            // core/removed rank, or the depth reached
    DescentPath path;        // parent residual segment of the removed interval
    Side side = Side::Left;  // which margin, for InMarginOfRemoved
};

inline const char* to_string(Location::Kind k) {
    switch (k) {
    case Location::Kind::InCore: return "InCore";
    case Location::Kind::InMarginOfRemoved: return "InMarginOfRemoved";
    case Location::Kind::InPCertified: return "InP_Certified";
    case Location::Kind::UndecidedAtDepth: return "UndecidedAtDepth";
    }
    return "?";
}

// The symmetric Cantor-like set P for a parameter r >= 1.
//
// From every rank-(n-1) residual segment (length r_{n-1}) the concentric open
// interval of length u_n = (4^r - 2) / 4^{rn} is removed, leaving two closed
// children of length r_n = 4^{-rn}. Each removed interval carries a concentric
// open core of length v_n = u_n / 3^{nr}. For integer r every quantity is an
// exact rational; otherwise all are enclosures at params.precision.
class Scheme {
public:
    explicit Scheme(SchemeParams params) : params_(std::move(params)) {
        if (params_.r < 1) throw DomainError("scheme parameter r must be >= 1");
        if (params_.depth_cap < 1) throw DomainError("depth_cap must be >= 1");
        PrecisionScope scope(params_.precision);
        exact_ = is_integer(params_.r);
        four_r_ = pow_real(Real(4), Real(params_.r));
        three_r_ = pow_real(Real(3), Real(params_.r));
        const Real inv4 = Real(1) / four_r_;
        const Real inv3 = Real(1) / three_r_;
        const Real numer = four_r_ - Real(2);
        const int top = params_.depth_cap + 1;
        r_.reserve(static_cast<std::size_t>(top) + 1);
        u_.reserve(static_cast<std::size_t>(top) + 1);
        v_.reserve(static_cast<std::size_t>(top) + 1);
        margin_.reserve(static_cast<std::size_t>(top) + 1);
        Real rn(1), core_ratio(1);
        for (int n = 0; n <= top; ++n) {
            r_.push_back(rn);
            if (n == 0) {
                u_.emplace_back(0);
                v_.emplace_back(0);
                margin_.emplace_back(0);
            } else {
                // u_n = (4^r - 2) r_n, v_n = u_n 3^{-nr}
                Real u = numer * rn;
                Real v = u * core_ratio;
                margin_.push_back((u - v) / Real(2));
                u_.push_back(std::move(u));
                v_.push_back(std::move(v));
            }
            rn = rn * inv4;
            core_ratio = core_ratio * inv3;
        }
    }

    const SchemeParams& params() const { return params_; }
    const Rational& r() const { return params_.r; }
    int depth_cap() const { return params_.depth_cap; }
    bool exact_mode() const { return exact_; }
    const Real& four_r() const { return four_r_; }
    const Real& three_r() const { return three_r_; }

    const Real& u_length(int n) const {
        if (n < 1) throw DomainError("u_length: rank must be >= 1");
        return at(u_, n);
    }
    const Real& v_length(int n) const {
        if (n < 1) throw DomainError("v_length: rank must be >= 1");
        return at(v_, n);
    }
    const Real& residual_length(int n) const {
        if (n < 0) throw DomainError("residual_length: rank must be >= 0");
        return at(r_, n);
    }
    // (u_n - v_n) / 2, the gap between a removed interval and its core on each side.
    const Real& margin(int n) const {
        if (n < 1) throw DomainError("margin: rank must be >= 1");
        return at(margin_, n);
    }

    ResidualSegment root() const { return {0, DescentPath(), Real(0), Real(1)}; }

    ResidualSegment child(const ResidualSegment& s, Side side) const {
        const Real& len = residual_length(s.rank + 1);
        if (side == Side::Left) return {s.rank + 1, s.path.child(side), s.lo, s.lo + len};
        return {s.rank + 1, s.path.child(side), s.hi - len, s.hi};
    }

    RemovedInterval removed_of(const ResidualSegment& s) const {
        const int n = s.rank + 1;
        const Real lo = s.lo + residual_length(n);
        const Real hi = s.hi - residual_length(n);
        const Real clo = lo + margin(n);
        const Real chi = hi - margin(n);
        return {n, s.path, lo, hi, {n, clo, chi}};
    }

    ResidualSegment residual_segment(const DescentPath& path) const {
        if (static_cast<int>(path.size()) > params_.depth_cap)
            throw DepthError("residual_segment: path longer than depth_cap");
        ResidualSegment s = root();
        for (Side b : path.bits()) s = child(s, b);
        return s;
    }

    RemovedInterval removed_interval(const DescentPath& path) const {
        if (static_cast<int>(path.size()) + 1 > params_.depth_cap)
            throw DepthError("removed_interval: rank exceeds depth_cap");
        return removed_of(residual_segment(path));
    }

    // Left endpoint of the segment at `path`: sum over Right turns at depth j of r_{j-1} - r_j.
    Real left_endpoint(const DescentPath& path) const {
        Real a(0);
        for (std::size_t j = 1; j <= path.size(); ++j)
            if (path[j - 1] == Side::Right) a += residual_length(static_cast<int>(j) - 1) - residual_length(static_cast<int>(j));
        return a;
    }

    // Coordinate of an eventually periodic point of P. The residual structure is
    // self-similar with ratio 4^{-r}, so the periodic part solves y = a + 4^{-rq} y.
    Real point(const PPoint& p) const {
        if (p.period.empty()) throw ValidationError("P-point needs a nonempty period");
        const int q = static_cast<int>(p.period.size());
        const int m = static_cast<int>(p.prefix.size());
        if (std::max(q, m) > params_.depth_cap) throw DepthError("P-point address longer than depth_cap");
        const Real y = left_endpoint(p.period) / (Real(1) - residual_length(q));
        return left_endpoint(p.prefix) + residual_length(m) * y;
    }

    // Classifies x by descending through the construction.
    Location locate(const Real& x, int max_rank) const {
        if (max_rank > params_.depth_cap) throw DepthError("locate: max_rank exceeds depth_cap");
        if (certainly_less(x, Real(0)) || certainly_greater(x, Real(1)))
            throw DomainError("locate: x outside [0,1]");
        if (!certainly_ge(x, Real(0)) || !certainly_le(x, Real(1)))
            throw UndecidableError("locate: cannot certify x in [0,1]");
        Location out;
        Real lo(0), hi(1);
        std::vector<Side> path;
        for (int m = 0;; ++m) {
            if (certainly_equal(x, lo) || certainly_equal(x, hi)) {
                out.kind = Location::Kind::InPCertified;
                out.rank = m;
                out.path = DescentPath(path);
                return out;
            }
            if (m >= max_rank) {
                out.kind = Location::Kind::UndecidedAtDepth;
                out.rank = m;
                out.path = DescentPath(path);
                return out;
            }
            const int n = m + 1;
            const Real ul = lo + residual_length(n);
            const Real uh = hi - residual_length(n);
            if (certainly_le(x, ul)) {
                hi = ul;
                path.push_back(Side::Left);
                continue;
            }
            if (certainly_ge(x, uh)) {
                lo = uh;
                path.push_back(Side::Right);
                continue;
            }
            if (!(certainly_less(ul, x) && certainly_less(x, uh)))
                throw UndecidableError("locate: x too close to a removed-interval endpoint");
            const Real vl = ul + margin(n);
            const Real vh = uh - margin(n);
            out.rank = n;
            out.path = DescentPath(path);
            if (certainly_less(vl, x) && certainly_less(x, vh)) {
                out.kind = Location::Kind::InCore;
            } else if (certainly_le(x, vl)) {
                out.kind = Location::Kind::InMarginOfRemoved;
                out.side = Side::Left;
            } else if (certainly_ge(x, vh)) {
                out.kind = Location::Kind::InMarginOfRemoved;
                out.side = Side::Right;
            } else {
                throw UndecidableError("locate: x too close to a core endpoint");
            }
            return out;
        }
    }
    Location locate(const Real& x) const { return locate(x, params_.depth_cap); }

private:
    const Real& at(const std::vector<Real>& v, int n) const {
        if (n >= static_cast<int>(v.size()))
            throw DepthError("rank " + std::to_string(n) + " beyond depth_cap " + std::to_string(params_.depth_cap));
        return v[static_cast<std::size_t>(n)];
    }

    SchemeParams params_;
    bool exact_ = true;
    Real four_r_, three_r_;
    std::vector<Real> r_, u_, v_, margin_;
};

} // namespace hkr
