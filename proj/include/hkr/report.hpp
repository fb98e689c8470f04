#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "hkr/acr.hpp"
#include "hkr/blowup.hpp"
#include "hkr/inequality.hpp"
#include "hkr/lrcalc.hpp"
#include "hkr/verify.hpp"

namespace hkr::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Exact values as "p/q"; enclosures as {"center": ..., "radius": ...}.
inline Json to_json(const Real& v) {
    if (v.is_exact()) return to_string(v.exact());
    const auto [c, r] = v.center_radius();
    return Json{{"center", c}, {"radius", r}};
}

// Absent values are divergent sums.
inline Json to_json(const std::optional<Real>& v) { return v ? to_json(*v) : Json("divergent"); }

inline Rational rational_from_json(const Json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw ValidationError("expected a rational as \"p/q\" or an integer, got " + j.dump());
}

inline Real real_from_json(const Json& j) {
    if (j.is_object()) {
        if (!j.contains("center") || !j.contains("radius")) throw ValidationError("enclosure needs center and radius");
        const Rational c = rational_from_json(j.at("center")), r = rational_from_json(j.at("radius"));
        if (r < 0) throw ValidationError("negative enclosure radius");
        return Real::between(Real(Rational(c - r)), Real(Rational(c + r)));
    }
    return Real(rational_from_json(j));
}

// {"breakpoints": ["p/q", ...], "values": ["p/q", ...]}
inline MonotoneStep monotone_step_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values"))
        throw ValidationError("step function JSON needs \"breakpoints\" and \"values\"");
    const Json& b = j.at("breakpoints");
    const Json& v = j.at("values");
    if (!b.is_array() || !v.is_array()) throw ValidationError("breakpoints and values must be arrays");
    std::vector<Rational> bps, vals;
    for (const auto& x : b) bps.push_back(rational_from_json(x));
    for (const auto& x : v) vals.push_back(rational_from_json(x));
    return MonotoneStep(std::move(bps), std::move(vals));
}

inline MonotoneStep read_monotone_step(std::istream& in) {
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("malformed step function JSON: ") + e.what());
    }
    return monotone_step_from_json(j);
}

inline Json to_json(const StepFunction& s) {
    Json b = Json::array(), v = Json::array();
    for (const auto& x : s.breakpoints()) b.push_back(to_string(x));
    for (const auto& x : s.values()) v.push_back(to_string(x));
    return Json{{"breakpoints", b}, {"values", v}};
}

// {"interval": ["p/q", "p/q"], "tag_path": "LLRL", "tag_kind": "left_endpoint"}
inline TaggedInterval tagged_interval_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("interval") || !j.contains("tag_path") || !j.contains("tag_kind"))
        throw ValidationError("tagged interval needs interval, tag_path and tag_kind");
    const Json& iv = j.at("interval");
    if (!iv.is_array() || iv.size() != 2) throw ValidationError("interval must be a pair");
    return TaggedInterval::make(real_from_json(iv[0]), real_from_json(iv[1]), j.at("tag_path").get<std::string>(),
                                parse_tag_kind(j.at("tag_kind").get<std::string>()));
}

inline Json to_json(const TaggedInterval& I) {
    return Json{{"interval", Json::array({to_json(I.c), to_json(I.d)})},
                {"tag_path", I.tag_path()},
                {"tag_kind", to_string(I.kind())}};
}

// One tagged interval per line; blank lines are skipped.
inline TaggedCollection read_collection(std::istream& in) {
    TaggedCollection out;
    std::string line;
    for (long lineno = 1; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(tagged_interval_from_json(Json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("collection line " + std::to_string(lineno) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError("collection line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline void write_collection(std::ostream& out, const TaggedCollection& coll) {
    for (const auto& I : coll) out << to_json(I).dump() << '\n';
}

inline Json to_json(const TaggedCollection& coll) {
    Json arr = Json::array();
    for (const auto& I : coll) arr.push_back(to_json(I));
    return arr;
}

inline Json to_json(const ChainReport& rep) {
    Json intervals = Json::array();
    for (std::size_t i = 0; i < rep.intervals.size(); ++i) {
        const auto& row = rep.intervals[i];
        intervals.push_back(Json{{"i", i},
                                 {"mean", to_json(row.mean)},
                                 {"lhs", to_json(row.lhs)},
                                 {"inner", to_json(row.inner)},
                                 {"middle1", to_json(row.middle1)},
                                 {"middle2", to_json(row.middle2)}});
    }
    Json pairs = Json::array();
    for (const auto& p : rep.pairs)
        pairs.push_back(Json{{"i", p.i},
                             {"k", p.rank},
                             {"path", p.path.str()},
                             {"overlap", to_json(p.overlap)},
                             {"local_mean", to_json(p.local_mean)},
                             {"local_root", to_json(p.local_root)},
                             {"overlap_ok", p.overlap_ok},
                             {"bound_ok", p.bound_ok}});
    Json segments = Json::array();
    for (const auto& e : rep.segments)
        segments.push_back(Json{{"i", e.i},
                                {"m", e.rank},
                                {"path", e.path.str()},
                                {"sum_mean", to_json(e.sum_mean)},
                                {"sum_root", to_json(e.sum_root)},
                                {"unresolved", e.unresolved}});
    Json ranks = Json::array();
    for (const auto& r : rep.ranks)
        ranks.push_back(Json{{"k", r.rank}, {"pairs", r.pairs}, {"sum_root", to_json(r.sum_root)}});
    return Json{{"n", rep.n},
                {"s", to_string(rep.s)},
                {"eta", to_json(rep.eta)},
                {"total_length", to_json(rep.total_length)},
                {"lhs", to_json(rep.lhs)},
                {"middle1", to_json(rep.middle1)},
                {"middle2", to_json(rep.middle2)},
                {"closed_bound", to_json(rep.closed_bound)},
                {"checks",
                 Json{{"hypothesis", rep.hypothesis_ok},
                      {"cores_avoided", rep.cores_avoided},
                      {"overlaps", rep.overlaps_ok},
                      {"local_bounds", rep.local_bounds_ok},
                      {"incidence", rep.incidence_ok},
                      {"lhs_le_middle1", rep.link1},
                      {"middle1_le_middle2", rep.link2},
                      {"middle2_le_closed", rep.link3}}},
                {"certified", rep.certified},
                {"intervals", intervals},
                {"pairs", pairs},
                {"segments", segments},
                {"ranks", ranks},
                {"notes", rep.notes}};
}

inline Json to_json(const ThresholdReport& t) {
    return Json{{"s", to_string(t.s)},
                {"s_star", to_json(t.s_star)},
                {"ratio_limit", to_json(t.ratio_limit)},
                {"verdict", to_string(t.verdict)}};
}

inline Json to_json(const DivergenceReport& rep) {
    Json rows = Json::array();
    for (const auto& row : rep.rows)
        rows.push_back(Json{{"n", row.n},
                            {"h_n", to_json(row.h)},
                            {"quantity", to_json(row.quantity)},
                            {"v_n_over_hn2", to_json(row.v_over_h2)},
                            {"closed_bound", to_json(row.closed_bound)},
                            {"pointwise_min", to_json(row.pointwise_min)},
                            {"certified", row.certified}});
    return Json{{"alpha", to_string(rep.alpha)},
                {"r_variation", to_string(rep.r_variation)},
                {"verdict", to_string(rep.verdict)},
                {"rows", rows},
                {"notes", rep.notes}};
}

inline Json to_json(const NullsetReport& rep) {
    Json rows = Json::array();
    for (const auto& r : rep.rows)
        rows.push_back(Json{{"n", r.n}, {"remaining", to_json(r.remaining)}, {"expected", to_json(r.expected)}, {"certified", r.certified}});
    Json residual = Json::array();
    for (const auto& r : rep.residual_rows)
        residual.push_back(Json{{"n", r.n},
                                {"r_n", to_json(r.r_n)},
                                {"halved", to_json(r.halved)},
                                {"u_over_4r_minus_2", to_json(r.ratio)},
                                {"certified", r.certified}});
    return Json{{"remaining", rows},
                {"residual", residual},
                {"series", Json{{"terms", rep.terms},
                                {"sum", to_json(rep.series)},
                                {"closed", to_json(rep.closed)},
                                {"removed_length", to_json(rep.removed)},
                                {"certified", rep.series_certified}}},
                {"certified", rep.certified}};
}

inline Json to_json(const NormReport& rep) {
    return Json{{"r", to_string(rep.r)},
                {"pieces", rep.pieces},
                {"direct", to_json(rep.direct)},
                {"series", to_json(rep.series)},
                {"certified", rep.certified}};
}

inline Json to_json(const InequalityCheck& c) {
    return Json{{"lhs", to_json(c.lhs)}, {"rhs", to_json(c.rhs)}, {"certified", c.certified}};
}

// CSV cells: decimal bounds, or the exact value rendered to 20 significant digits.
inline std::string csv_lower(const Real& v) { return v.decimal_lower(); }
inline std::string csv_upper(const Real& v) { return v.decimal_upper(); }
inline std::string csv_value(const Real& v) { return v.center_radius().first; }

// Columns: h, lower, upper, quotient_lower, quotient_upper.
inline void write_csv(std::ostream& out, const DecaySeries& s) {
    out << "h,lower,upper,quotient_lower,quotient_upper\n";
    for (std::size_t i = 0; i < s.h_values.size(); ++i)
        out << csv_value(s.h_values[i]) << ',' << csv_lower(s.means[i]) << ',' << csv_upper(s.means[i]) << ','
            << csv_lower(s.quotients[i]) << ',' << csv_upper(s.quotients[i]) << '\n';
}

// Columns: n, h_n, quantity_lower, quantity_upper, v_n_over_hn2, closed_bound, certified.
inline void write_csv(std::ostream& out, const DivergenceReport& rep, bool header = true) {
    if (header) out << "n,h_n,quantity_lower,quantity_upper,v_n_over_hn2,closed_bound,certified\n";
    for (const auto& row : rep.rows)
        out << row.n << ',' << csv_value(row.h) << ',' << csv_lower(row.quantity) << ',' << csv_upper(row.quantity) << ','
            << csv_value(row.v_over_h2) << ',' << csv_value(row.closed_bound) << ',' << (row.certified ? "true" : "false")
            << '\n';
}

} // namespace hkr::io
