// hkr_lab: runs the certified checks of the construction as subcommands and prints
// JSON (or CSV) reports.
//
// Exit codes: 0 all certified, 1 usage or validation error, 2 certified violation,
// 3 undecidable at the configured precision.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "hkr/report.hpp"

using namespace hkr;
using io::Json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kViolation = 2, kUndecidable = 3 };

struct RunConfig {
    std::string r = "1";
    std::string mode;  // exact | enclosure; defaults by r
    int precision_bits = 256;
    int depth_cap = 64;
    std::uint64_t seed = 1;
    long budget = 10000;
    std::string tolerance = "1e-20";
    std::string format = "json";
    std::string out;

    Rational r_value() const { return parse_rational(r); }
    Real tol() const {
        const Rational t = parse_rational(tolerance);
        if (t <= 0) throw ValidationError("tolerance must be positive");
        return Real(t);
    }
    SchemeParams params() const {
        const Rational rv = r_value();
        if (rv < 1) throw ValidationError("r must be >= 1");
        if (precision_bits < 64) throw ValidationError("precision-bits must be >= 64");
        if (depth_cap < 1) throw ValidationError("depth-cap must be >= 1");
        if (!mode.empty() && mode != "exact" && mode != "enclosure") throw ValidationError("mode must be exact or enclosure");
        if (mode == "exact" && !is_integer(rv)) throw ValidationError("exact mode needs an integer r");
        return SchemeParams{rv, precision_bits, depth_cap};
    }
    Json json() const {
        const SchemeParams p = params();
        return Json{{"r", to_string(p.r)},
                    {"mode", mode.empty() ? (is_integer(p.r) ? "exact" : "enclosure") : mode},
                    {"precision_bits", precision_bits},
                    {"depth_cap", depth_cap},
                    {"seed", seed},
                    {"budget", budget},
                    {"tolerance", to_string(parse_rational(tolerance))}};
    }
};

const char* status_name(int code) {
    switch (code) {
    case kOk: return "certified";
    case kViolation: return "violation";
    case kUndecidable: return "undecidable";
    default: return "error";
    }
}

Json envelope(const std::string& command, const RunConfig& cfg) {
    return Json{{"schema", io::kSchemaVersion}, {"command", command}, {"config", cfg.json()}};
}

// Writes to --out or stdout.
void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + cfg.out);
    f << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::vector<Rational> parse_list(const std::vector<std::string>& items) {
    std::vector<Rational> out;
    for (const auto& s : items) out.push_back(parse_rational(s));
    return out;
}

int run_nullset(const RunConfig& cfg) {
    const Scheme scheme(cfg.params());
    const NullsetReport rep = nullset_report(scheme, cfg.depth_cap, cfg.tol());
    const int code = rep.certified ? kOk : kUndecidable;
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "n,remaining,expected,certified\n";
        for (const auto& row : rep.rows)
            os << row.n << ',' << io::csv_value(row.remaining) << ',' << io::csv_value(row.expected) << ','
               << (row.certified ? "true" : "false") << '\n';
        emit(cfg, os.str());
        return code;
    }
    Json j = envelope("verify-nullset", cfg);
    j["report"] = io::to_json(rep);
    j["status"] = status_name(code);
    emit(cfg, dump(j));
    return code;
}

int run_norm(const RunConfig& cfg) {
    const Scheme scheme(cfg.params());
    const CounterexampleF F(scheme);
    const NormReport rep = norm_report(F, cfg.tol());
    const bool disjoint = compare(rep.direct, rep.series) != Verdict::Overlapping;
    const int code = rep.certified ? kOk : disjoint ? kViolation : kUndecidable;
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "quantity,lower,upper\n";
        os << "direct," << io::csv_lower(rep.direct) << ',' << io::csv_upper(rep.direct) << '\n';
        os << "series," << io::csv_lower(rep.series) << ',' << io::csv_upper(rep.series) << '\n';
        emit(cfg, os.str());
        return code;
    }
    Json j = envelope("verify-norm", cfg);
    j["report"] = io::to_json(rep);
    j["status"] = status_name(code);
    emit(cfg, dump(j));
    return code;
}

int run_acr(const RunConfig& cfg, const std::string& epsilon_text, const std::vector<std::string>& s_list,
            const std::string& collection_file) {
    if (cfg.budget < 1) throw ValidationError("budget must be >= 1");
    const Scheme scheme(cfg.params());
    const CounterexampleF F(scheme);
    const Rational eps = parse_rational(epsilon_text);
    if (eps <= 0) throw ValidationError("epsilon must be positive");
    if (s_list.size() > 1) throw ValidationError("verify-acr takes a single --s");
    const Rational s = s_list.empty() ? scheme.r() : parse_rational(s_list.front());
    if (s < 1) throw ValidationError("s must be >= 1");
    const Real tol = cfg.tol();

    const EtaChoice e = epsilon_to_eta(scheme, eps);
    SearchOptions opt;
    opt.budget = cfg.budget;
    opt.seed = cfg.seed;
    opt.verify_chains = true;
    const SearchResult res = adversarial_search(F, e.n, e.eta, s, eps, opt, tol);
    const ChainReport best_chain = chain_verify(F, res.best, e.n, s, tol);

    int code = kOk;
    if (res.violations > 0) code = kViolation;
    else if (res.undecided > 0 || res.chain_failures > 0 || !best_chain.certified) code = kUndecidable;

    Json j = envelope("verify-acr", cfg);
    j["epsilon"] = to_string(eps);
    j["s"] = to_string(s);
    j["selection"] = Json{{"n", e.n}, {"eta", io::to_json(e.eta)}, {"tail", io::to_json(e.tail)}};
    j["search"] = Json{{"evaluated", res.evaluated},
                       {"violations", res.violations},
                       {"undecided", res.undecided},
                       {"chain_failures", res.chain_failures},
                       {"best_index", res.best_index},
                       {"best_sum", io::to_json(res.best_sum)},
                       {"best_sum_upper", res.best_sum.decimal_upper()},
                       {"best_collection", io::to_json(res.best)}};
    j["best_chain"] = io::to_json(best_chain);

    if (!collection_file.empty()) {
        std::ifstream in(collection_file);
        if (!in) throw ValidationError("cannot read " + collection_file);
        const TaggedCollection coll = io::read_collection(in);
        const Real sum = ac_sum(F, coll, s, tol);
        const ChainReport chain = chain_verify(F, coll, e.n, s, tol);
        // The bound only applies to collections under the length hypothesis.
        if (chain.hypothesis_ok) {
            if (!certainly_less(sum, Real(eps))) code = std::max(code, certainly_ge(sum, Real(eps)) ? int(kViolation) : int(kUndecidable));
            if (!chain.certified && code == kOk) code = kUndecidable;
        }
        j["input"] = Json{{"ac_sum", io::to_json(sum)}, {"chain", io::to_json(chain)}};
    }
    j["status"] = status_name(code);

    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "key,value\n";
        os << "n," << e.n << "\neta," << io::csv_value(e.eta) << "\nevaluated," << res.evaluated << "\nviolations,"
           << res.violations << "\nundecided," << res.undecided << "\nchain_failures," << res.chain_failures
           << "\nbest_sum_upper," << res.best_sum.decimal_upper() << "\nstatus," << status_name(code) << '\n';
        emit(cfg, os.str());
        return code;
    }
    emit(cfg, dump(j));
    return code;
}

int run_blowup(const RunConfig& cfg, const std::vector<std::string>& alpha_list, const std::string& r_file,
               const std::string& x_path, int n_max) {
    const Scheme scheme(cfg.params());
    const CounterexampleF F(scheme);
    std::optional<MonotoneStep> R;
    if (!r_file.empty()) {
        std::ifstream in(r_file);
        if (!in) throw ValidationError("cannot read " + r_file);
        R = io::read_monotone_step(in);
    }
    const PPoint x = PPoint::parse(x_path);
    if (n_max < 1 || n_max > scheme.depth_cap()) throw ValidationError("n-max must be in [1, depth-cap]");
    const auto alphas = alpha_list.empty() ? std::vector<Rational>{Rational(0)} : parse_list(alpha_list);

    std::vector<DivergenceReport> reps;
    int code = kOk;
    for (const auto& a : alphas) {
        reps.push_back(divergence_report(F, x, a, R ? &*R : nullptr, 1, n_max, cfg.tol()));
        if (reps.back().verdict != BlowupVerdict::Diverges) code = kUndecidable;
    }
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "alpha,n,h_n,quantity_lower,quantity_upper,v_n_over_hn2,closed_bound,certified\n";
        for (const auto& rep : reps) {
            std::ostringstream rows;
            io::write_csv(rows, rep, false);
            std::istringstream lines(rows.str());
            for (std::string line; std::getline(lines, line);) os << to_string(rep.alpha) << ',' << line << '\n';
        }
        emit(cfg, os.str());
        return code;
    }
    Json j = envelope("verify-blowup", cfg);
    j["x"] = x.str();
    j["n_max"] = n_max;
    if (R) j["R"] = io::to_json(*R);
    Json arr = Json::array();
    for (const auto& rep : reps) arr.push_back(io::to_json(rep));
    j["reports"] = arr;
    j["status"] = status_name(code);
    emit(cfg, dump(j));
    return code;
}

int run_threshold(const RunConfig& cfg, const std::vector<std::string>& s_list) {
    const Scheme scheme(cfg.params());
    const auto ss = s_list.empty() ? std::vector<Rational>{Rational(1), make_rational(317, 200), Rational(2)}
                                   : parse_list(s_list);
    std::vector<ThresholdReport> reps;
    for (const auto& s : ss) reps.push_back(acs_threshold(scheme, s));
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "s,s_star_lower,s_star_upper,ratio_lower,ratio_upper,verdict\n";
        for (const auto& t : reps)
            os << to_string(t.s) << ',' << io::csv_lower(t.s_star) << ',' << io::csv_upper(t.s_star) << ','
               << io::csv_lower(t.ratio_limit) << ',' << io::csv_upper(t.ratio_limit) << ',' << to_string(t.verdict) << '\n';
        emit(cfg, os.str());
        return kOk;
    }
    Json j = envelope("threshold", cfg);
    Json arr = Json::array();
    for (const auto& t : reps) arr.push_back(io::to_json(t));
    j["s_star"] = io::to_json(reps.front().s_star);
    j["rows"] = arr;
    j["status"] = status_name(kOk);
    emit(cfg, dump(j));
    return kOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--r", cfg.r, "exponent r >= 1 (rational or decimal)");
    sub->add_option("--mode", cfg.mode, "exact | enclosure (exact needs integer r)");
    sub->add_option("--precision-bits", cfg.precision_bits, "MPFR precision for enclosures");
    sub->add_option("--depth-cap", cfg.depth_cap, "maximum construction rank");
    sub->add_option("--seed", cfg.seed, "search seed");
    sub->add_option("--budget", cfg.budget, "search iterations");
    sub->add_option("--tolerance", cfg.tolerance, "target enclosure width");
    sub->add_option("--format", cfg.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", cfg.out, "output path (default stdout)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified checks for the Cantor-like counterexample F on P"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string epsilon = "1/10", r_file, collection, x_path = "(L)";
    std::vector<std::string> alphas, s_values;
    int n_max = 25;

    auto* nullset = app.add_subcommand("verify-nullset", "remaining measure, residual identities, removed length 1");
    auto* norm = app.add_subcommand("verify-norm", "int |F|^r by direct integration against the series");
    auto* acr = app.add_subcommand("verify-acr", "epsilon -> eta, adversarial search, bound chain");
    auto* blowup = app.add_subcommand("verify-blowup", "divergence of the blow-up quantity for F - R");
    auto* threshold = app.add_subcommand("threshold", "convergence of the AC_s bound series");
    for (auto* sub : {nullset, norm, acr, blowup, threshold}) add_common(sub, cfg);
    acr->add_option("--epsilon", epsilon, "target epsilon");
    acr->add_option("--s", s_values, "exponent of the AC sum (default r)");
    acr->add_option("--collection", collection, "tagged collection as JSON lines, evaluated in addition");
    blowup->add_option("--alpha", alphas, "slopes alpha (repeat or comma separated)")->delimiter(',');
    blowup->add_option("--R-file", r_file, "monotone step R as JSON");
    blowup->add_option("--x", x_path, "site address prefix(period)");
    blowup->add_option("--n-max", n_max, "largest rank");
    threshold->add_option("--s", s_values, "exponents s (repeat or comma separated)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*nullset) return run_nullset(cfg);
        if (*norm) return run_norm(cfg);
        if (*acr) return run_acr(cfg, epsilon, s_values, collection);
        if (*blowup) return run_blowup(cfg, alphas, r_file, x_path, n_max);
        if (*threshold) return run_threshold(cfg, s_values);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return kUsage;
    } catch (const UndecidableError& e) {
        std::cerr << "undecidable: " << e.what() << '\n';
        return kUndecidable;
    } catch (const DepthError& e) {
        std::cerr << "undecidable: " << e.what() << '\n';
        return kUndecidable;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
