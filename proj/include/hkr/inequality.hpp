#pragma once

#include <vector>

#include "hkr/error.hpp"
#include "hkr/stepfn.hpp"

namespace hkr {

struct InequalityCheck {
    Real lhs, rhs;
    bool certified = false;
};

namespace detail {
inline void require_positive(const std::vector<Real>& a, const char* what) {
    if (a.empty()) throw DomainError(std::string(what) + ": empty sequence");
    for (const auto& x : a)
        if (x.certain_sign() <= 0) throw DomainError(std::string(what) + ": terms must be positive");
}
} // namespace detail

// (sum a_j)^{1/s} <= sum a_j^{1/s} for s >= 1. Equality holds for one term or s = 1,
// where both sides are the same expression; otherwise the inequality is strict and
// certified from enclosures.
inline InequalityCheck root_subadditivity(const std::vector<Real>& a, const Rational& s) {
    detail::require_positive(a, "root_subadditivity");
    if (s < 1) throw DomainError("root_subadditivity needs s >= 1");
    const Rational e = 1 / s;
    InequalityCheck out{Real(0), Real(0)};
    for (const auto& x : a) {
        out.lhs += x;
        out.rhs += s == 1 ? x : pos_pow(x, e);
    }
    if (s != 1) out.lhs = pos_pow(out.lhs, e);
    out.certified = s == 1 || a.size() == 1 || certainly_le(out.lhs, out.rhs);
    return out;
}

// sum a_j / sum b_j <= sum a_j / b_j for positive a, b.
inline InequalityCheck double_decker(const std::vector<Real>& a, const std::vector<Real>& b) {
    detail::require_positive(a, "double_decker");
    detail::require_positive(b, "double_decker");
    if (a.size() != b.size()) throw DomainError("double_decker: sequences differ in length");
    Real sa(0), sb(0), ratios(0);
    for (std::size_t j = 0; j < a.size(); ++j) {
        sa += a[j];
        sb += b[j];
        ratios += a[j] / b[j];
    }
    InequalityCheck out{sa / sb, ratios};
    out.certified = certainly_le(out.lhs, out.rhs) || (a.size() == 1 && a[0].is_exact() && b[0].is_exact());
    return out;
}

} // namespace hkr
