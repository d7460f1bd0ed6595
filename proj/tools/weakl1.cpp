// Command-line front end: builds the staircase family, certifies norms,
// runs the sign-average verifiers, and exports functions, sequences, and
// reports. Every command is deterministic given its flags (and seed), so a
// rerun reproduces any output file byte for byte.
//
// Exit codes: 0 = all verdicts Pass, 1 = some verdict Fail,
//             2 = no Fail but some Inconclusive, 64 = bad input or I/O.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "weakl1/serialize.hpp"
#include "weakl1/typeprobe.hpp"

using namespace weakl1;

namespace {

// ---------------------------------------------------------------- numbers

// Accepts "p/q", "123", "0.0001", and "1e-6" style literals.
Rational parse_number(const std::string& text) {
    try {
        if (text.find('/') != std::string::npos) return Rational::parse(text);
        auto epos = text.find_first_of("eE");
        std::string mant_s = epos == std::string::npos ? text : text.substr(0, epos);
        long exp10 = 0;
        if (epos != std::string::npos) exp10 = std::stol(text.substr(epos + 1));

        Rational mant;
        auto dot = mant_s.find('.');
        if (dot == std::string::npos) {
            mant = Rational::parse(mant_s);
        } else {
            std::string digits = mant_s.substr(0, dot) + mant_s.substr(dot + 1);
            long frac = static_cast<long>(mant_s.size() - dot - 1);
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, static_cast<unsigned long>(frac));
            mant = Rational(mpz_class(digits), den);
        }
        return mant * pow_int(Rational(10), exp10);
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("bad numeric literal '" + text + "'");
    }
}

// ---------------------------------------------------------------- options

struct Options {
    long n = 3;
    long j = 1;
    long n_min = 3, n_max = 6;
    std::string tol = "1/1000000";
    std::string signs = "all";
    unsigned long long seed = 0;
    long budget = 400000000L;
    long points = 50;
    std::vector<std::string> at;
    long mesh = 0;
    std::string selector;
    std::string out;
    std::string format = "json";
};

ProbeBudget make_budget(const Options& o) {
    ProbeBudget b;
    b.tol = parse_number(o.tol);
    b.eval_budget = o.budget;
    if (o.signs == "all") {
        b.exhaustive = true;
    } else if (o.signs.rfind("sample:", 0) == 0) {
        b.exhaustive = false;
        try {
            b.sample_count = std::stol(o.signs.substr(7));
        } catch (const std::exception&) {
            throw invalid_parameter("--signs sample:K needs an integer K");
        }
        b.seed = o.seed;
    } else {
        throw invalid_parameter("--signs must be 'all' or 'sample:K'");
    }
    b.validate();
    return b;
}

// Evaluation points: explicit --at values first, otherwise the uniform grid
// i/(points+1), i = 1..points, which stays strictly inside (0,1).
std::vector<Rational> make_points(const Options& o) {
    std::vector<Rational> ts;
    if (!o.at.empty()) {
        ts.reserve(o.at.size());
        for (const std::string& s : o.at) ts.push_back(parse_number(s));
        return ts;
    }
    if (o.points < 1) throw invalid_parameter("--points must be >= 1");
    ts.reserve(static_cast<size_t>(o.points));
    for (long i = 1; i <= o.points; ++i) ts.emplace_back(i, o.points + 1);
    return ts;
}

// ---------------------------------------------------------------- selectors

PiecewiseFn resolve_selector(const std::string& sel) {
    if (!sel.empty() && sel[0] == '@') {
        std::string path = sel.substr(1);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw invalid_parameter("cannot open function file '" + path + "'");
        ordered_json doc;
        try {
            doc = ordered_json::parse(in);
        } catch (const std::exception& e) {
            throw parse_error("function file '" + path + "': " + e.what());
        }
        return function_from_json(doc);
    }
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        size_t colon = sel.find(':', start);
        parts.push_back(sel.substr(start, colon - start));
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    auto num = [&](size_t idx) {
        try {
            return std::stol(parts.at(idx));
        } catch (const std::exception&) {
            throw invalid_parameter("selector '" + sel + "': bad index field");
        }
    };
    if (parts[0] == "f" && parts.size() == 4) {
        ConstructionParams p = ConstructionParams::make(num(1));
        return make_f_ki(p, num(2), num(3));
    }
    if (parts[0] == "F" && parts.size() == 3) {
        ConstructionParams p = ConstructionParams::make(num(1));
        return make_F_k(p, num(2));
    }
    if (parts[0] == "g" && parts.size() == 3) {
        ConstructionParams p = ConstructionParams::make(num(1));
        return make_g(p, num(2));
    }
    throw invalid_parameter("selector '" + sel +
                            "' (expected f:n:k:i, F:n:k, g:n:j, or @file.json)");
}

// ---------------------------------------------------------------- rendering

int verdict_exit(Verdict v) {
    if (v == Verdict::Pass) return 0;
    if (v == Verdict::Fail) return 1;
    return 2;
}

std::string csv_preamble(const ordered_json& cfg) {
    std::string out;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        out += "# ";
        out += it.key();
        out += '=';
        out += it.value().is_string() ? it.value().get<std::string>() : it.value().dump();
        out += '\n';
    }
    return out;
}

void emit(const std::string& body, const std::string& out_path, Verdict overall) {
    if (out_path.empty() || out_path == "-") {
        std::cout << body;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw invalid_parameter("cannot write '" + out_path + "'");
    out << body;
    std::cout << "wrote " << out_path << " (" << verdict_name(overall) << ")\n";
}

std::string render_report(const ProbeReport& rep, const ordered_json& cfg,
                          const std::string& format) {
    if (format == "csv") return csv_preamble(cfg) + report_to_csv(rep);
    ordered_json j;
    j["config"] = cfg;
    j["report"] = report_to_json(rep);
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- commands

int cmd_norm(const Options& o) {
    PiecewiseFn f = resolve_selector(o.selector);
    Rational tol = parse_number(o.tol);
    Verdict v = Verdict::Pass;
    RatInterval enc{Rational(0), Rational(0)};
    std::string note;
    try {
        enc = weak_norm(f, tol, o.budget);
    } catch (const inconclusive_error& e) {
        enc = RatInterval(Rational::parse(e.best_lo), Rational::parse(e.best_hi));
        v = Verdict::Inconclusive;
        note = e.what();
    }

    ordered_json cfg;
    cfg["command"] = "norm";
    cfg["selector"] = o.selector;
    cfg["tol"] = tol.str();
    cfg["eval_budget"] = o.budget;

    std::string body;
    if (o.format == "csv") {
        body = csv_preamble(cfg) + "lo,hi,lo_dec,hi_dec,verdict\n" + enc.lo.str() + ',' +
               enc.hi.str() + ',' + enc.lo.decimal() + ',' + enc.hi.decimal() + ',' +
               verdict_name(v) + '\n';
    } else {
        ordered_json j;
        j["config"] = cfg;
        j["enclosure"] = interval_to_json_dec(enc);
        j["verdict"] = verdict_name(v);
        if (!note.empty()) j["note"] = note;
        body = j.dump(2) + "\n";
    }
    emit(body, o.out, v);
    return verdict_exit(v);
}

int cmd_rearrange(const Options& o) {
    PiecewiseFn f = resolve_selector(o.selector);
    Rational tol = parse_number(o.tol);
    std::vector<Rational> ts = make_points(o);
    for (const Rational& t : ts)
        if (t.sign() <= 0 || t >= Rational(1))
            throw invalid_parameter("rearrange: points must lie in (0,1)");

    Verdict overall = Verdict::Pass;
    std::vector<std::pair<RatInterval, bool>> rows;
    rows.reserve(ts.size());
    for (const Rational& t : ts) {
        try {
            rows.emplace_back(rearrangement_at(f, t, tol, o.budget), true);
        } catch (const inconclusive_error& e) {
            rows.emplace_back(
                RatInterval(Rational::parse(e.best_lo), Rational::parse(e.best_hi)), false);
            overall = Verdict::Inconclusive;
        }
    }

    ordered_json cfg;
    cfg["command"] = "rearrange";
    cfg["selector"] = o.selector;
    cfg["tol"] = tol.str();
    cfg["eval_budget"] = o.budget;
    cfg["points"] = static_cast<long>(ts.size());

    std::string body;
    if (o.format == "csv") {
        body = csv_preamble(cfg) + "t,lo,hi,t_dec,lo_dec,hi_dec\n";
        for (size_t i = 0; i < ts.size(); ++i) {
            const RatInterval& r = rows[i].first;
            body += ts[i].str() + ',' + r.lo.str() + ',' + r.hi.str() + ',' + ts[i].decimal() +
                    ',' + r.lo.decimal() + ',' + r.hi.decimal() + '\n';
        }
    } else {
        ordered_json j;
        j["config"] = cfg;
        ordered_json out_rows = ordered_json::array();
        for (size_t i = 0; i < ts.size(); ++i) {
            ordered_json jr;
            jr["t"] = ts[i].str();
            jr["t_dec"] = ts[i].decimal();
            jr["value"] = interval_to_json_dec(rows[i].first);
            jr["converged"] = rows[i].second;
            out_rows.push_back(std::move(jr));
        }
        j["rows"] = std::move(out_rows);
        j["overall"] = verdict_name(overall);
        body = j.dump(2) + "\n";
    }
    emit(body, o.out, overall);
    return verdict_exit(overall);
}

ordered_json sign_config(const Options& o, const ProbeBudget& b) {
    ordered_json cfg;
    cfg["command"] = ""; // caller fills
    cfg["n"] = o.n;
    cfg["tol"] = b.tol.str();
    cfg["signs"] = o.signs;
    if (!b.exhaustive) cfg["seed"] = b.seed;
    cfg["eval_budget"] = b.eval_budget;
    cfg["format"] = o.format;
    return cfg;
}

int cmd_verify_lemma(const Options& o) {
    ProbeBudget b = make_budget(o);
    ProbeReport rep = verify_lemma(ConstructionParams::make(o.n), b);
    ordered_json cfg = sign_config(o, b);
    cfg["command"] = "verify-lemma";
    emit(render_report(rep, cfg, o.format), o.out, rep.overall);
    return verdict_exit(rep.overall);
}

int cmd_verify_units(const Options& o) {
    ProbeBudget b = make_budget(o);
    ProbeReport rep = verify_unit_norms(ConstructionParams::make(o.n), b);
    ordered_json cfg = sign_config(o, b);
    cfg["command"] = "verify-units";
    cfg.erase("signs");
    emit(render_report(rep, cfg, o.format), o.out, rep.overall);
    return verdict_exit(rep.overall);
}

int cmd_verify_gstar(const Options& o) {
    ProbeBudget b = make_budget(o);
    std::vector<Rational> ts = make_points(o);
    ProbeReport rep = verify_gstar(ConstructionParams::make(o.n), o.j, ts, b);
    ordered_json cfg = sign_config(o, b);
    cfg["command"] = "verify-gstar";
    cfg.erase("signs");
    cfg["j"] = o.j;
    cfg["points"] = static_cast<long>(ts.size());
    emit(render_report(rep, cfg, o.format), o.out, rep.overall);
    return verdict_exit(rep.overall);
}

int cmd_type_ratio(const Options& o) {
    if (o.n_min < 3 || o.n_min > o.n_max)
        throw invalid_parameter("type-ratio: need 3 <= n-min <= n-max");
    ProbeBudget b = make_budget(o);

    ordered_json cfg;
    cfg["command"] = "type-ratio";
    cfg["n_min"] = o.n_min;
    cfg["n_max"] = o.n_max;
    cfg["tol"] = b.tol.str();
    cfg["signs"] = o.signs;
    if (!b.exhaustive) cfg["seed"] = b.seed;
    cfg["eval_budget"] = b.eval_budget;
    cfg["format"] = o.format;

    Verdict overall = Verdict::Pass;
    std::vector<ProbeReport> reps;
    for (long n = o.n_min; n <= o.n_max; ++n) {
        reps.push_back(type1_ratio_report(ConstructionParams::make(n), b));
        overall = combine_verdicts(overall, reps.back().ratio_verdict);
    }

    std::string body;
    if (o.format == "csv") {
        body = csv_preamble(cfg) +
               "n,ratio_lo,ratio_hi,ratio_lo_dec,ratio_hi_dec,bound_lo,bound_hi,bound_hi_dec,"
               "verdict\n";
        for (const ProbeReport& r : reps) {
            body += std::to_string(r.n) + ',' + r.ratio.lo.str() + ',' + r.ratio.hi.str() + ',' +
                    r.ratio.lo.decimal() + ',' + r.ratio.hi.decimal() + ',' +
                    r.ratio_bound.lo.str() + ',' + r.ratio_bound.hi.str() + ',' +
                    r.ratio_bound.hi.decimal() + ',' + verdict_name(r.ratio_verdict) + '\n';
        }
    } else {
        ordered_json j;
        j["config"] = cfg;
        ordered_json rows = ordered_json::array();
        for (const ProbeReport& r : reps) {
            ordered_json jr;
            jr["n"] = r.n;
            jr["ratio"] = interval_to_json_dec(r.ratio);
            jr["ratio_bound"] = interval_to_json_dec(r.ratio_bound);
            jr["sign_mode"] = r.sign_mode;
            jr["verdict"] = verdict_name(r.ratio_verdict);
            rows.push_back(std::move(jr));
        }
        j["rows"] = std::move(rows);
        j["overall"] = verdict_name(overall);
        body = j.dump(2) + "\n";
    }
    emit(body, o.out, overall);
    return verdict_exit(overall);
}

int cmd_discrete(const Options& o) {
    ProbeReport rep = verify_discrete_lemma(ConstructionParams::make(o.n));
    ordered_json cfg;
    cfg["command"] = "discrete";
    cfg["n"] = o.n;
    cfg["format"] = o.format;
    emit(render_report(rep, cfg, o.format), o.out, rep.overall);
    return verdict_exit(rep.overall);
}

int cmd_export(const Options& o) {
    PiecewiseFn f = resolve_selector(o.selector);
    std::string body;
    if (o.mesh == 0) {
        if (o.format != "json")
            throw invalid_parameter("export: function documents are JSON; use --mesh for CSV");
        body = function_to_json(f).dump(2) + "\n";
    } else {
        if (o.mesh < 1) throw invalid_parameter("export: --mesh must be >= 1");
        FiniteSeq x;
        x.values.reserve(static_cast<size_t>(o.mesh));
        for (long i = 1; i <= o.mesh; ++i) x.values.push_back(eval_exact(f, Rational(i, o.mesh)));
        body = o.format == "csv" ? seq_to_csv(x) : seq_to_json(x).dump(2) + "\n";
    }
    emit(body, o.out, Verdict::Pass);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified weak-type norms for the reciprocal staircase family\n"
                 "exit codes: 0 all Pass, 1 any Fail, 2 Inconclusive, 64 bad input"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "key=value file with option defaults under a [subcommand] section; "
                   "explicit flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // one option block per subcommand so a config file section for one
    // command cannot bleed values into another
    std::vector<std::unique_ptr<Options>> blocks;
    int rc = 0;

    auto add_output = [&](CLI::App* sub, Options& o) {
        sub->fallthrough();
        sub->add_option("--out", o.out, "write the report here instead of stdout");
        sub->add_option("--format", o.format, "report format")
            ->check(CLI::IsMember({"json", "csv"}))
            ->capture_default_str();
    };
    auto add_tol_budget = [&](CLI::App* sub, Options& o) {
        sub->add_option("--tol", o.tol, "enclosure tolerance (p/q, decimal, or 1e-k)")
            ->capture_default_str();
        sub->add_option("--budget", o.budget, "evaluation budget per norm")
            ->capture_default_str();
    };
    auto add_signs = [&](CLI::App* sub, Options& o) {
        sub->add_option("--signs", o.signs, "sign vectors: all | sample:K")
            ->capture_default_str();
        sub->add_option("--seed", o.seed, "rng seed for sample mode")->capture_default_str();
    };
    auto fresh = [&]() -> Options& {
        blocks.push_back(std::make_unique<Options>());
        return *blocks.back();
    };

    {
        Options& o = fresh();
        CLI::App* norm = app.add_subcommand("norm", "certified norm of one function");
        norm->add_option("selector", o.selector, "f:n:k:i | F:n:k | g:n:j | @file.json")
            ->required();
        add_tol_budget(norm, o);
        add_output(norm, o);
        norm->callback([&] { rc = cmd_norm(o); });
    }
    {
        Options& o = fresh();
        CLI::App* rear =
            app.add_subcommand("rearrange", "decreasing rearrangement on a point grid");
        rear->add_option("selector", o.selector, "f:n:k:i | F:n:k | g:n:j | @file.json")
            ->required();
        rear->add_option("--points", o.points, "uniform grid size i/(points+1)")
            ->capture_default_str();
        rear->add_option("--at", o.at, "explicit evaluation points (repeatable)");
        add_tol_budget(rear, o);
        add_output(rear, o);
        rear->callback([&] { rc = cmd_rearrange(o); });
    }
    {
        Options& o = fresh();
        CLI::App* lemma = app.add_subcommand(
            "verify-lemma", "norm window for every signed combination of the diagonal family");
        lemma->add_option("--n", o.n, "family base (>= 3)")->capture_default_str();
        add_signs(lemma, o);
        add_tol_budget(lemma, o);
        add_output(lemma, o);
        lemma->callback([&] { rc = cmd_verify_lemma(o); });
    }
    {
        Options& o = fresh();
        CLI::App* units =
            app.add_subcommand("verify-units", "certify each diagonal member's norm value");
        units->add_option("--n", o.n, "family base (>= 3)")->capture_default_str();
        add_tol_budget(units, o);
        add_output(units, o);
        units->callback([&] { rc = cmd_verify_units(o); });
    }
    {
        Options& o = fresh();
        CLI::App* gstar = app.add_subcommand(
            "verify-gstar", "rearrangement of a diagonal member against its closed form");
        gstar->add_option("--n", o.n, "family base (>= 3)")->capture_default_str();
        gstar->add_option("--j", o.j, "diagonal member index")->capture_default_str();
        gstar->add_option("--points", o.points, "uniform grid size i/(points+1)")
            ->capture_default_str();
        gstar->add_option("--at", o.at, "explicit evaluation points (repeatable)");
        add_tol_budget(gstar, o);
        add_output(gstar, o);
        gstar->callback([&] { rc = cmd_verify_gstar(o); });
    }
    {
        Options& o = fresh();
        CLI::App* ratio = app.add_subcommand(
            "type-ratio", "sign-averaged norm over the summed member norms, tabulated in n");
        ratio->add_option("--n-min", o.n_min, "first family base")->capture_default_str();
        ratio->add_option("--n-max", o.n_max, "last family base")->capture_default_str();
        add_signs(ratio, o);
        add_tol_budget(ratio, o);
        add_output(ratio, o);
        ratio->callback([&] { rc = cmd_type_ratio(o); });
    }
    {
        Options& o = fresh();
        CLI::App* disc = app.add_subcommand(
            "discrete", "exact norm table for the mesh-sampled family, all sign vectors");
        disc->add_option("--n", o.n, "family base (3 or 4 stay materializable)")
            ->capture_default_str();
        add_output(disc, o);
        disc->callback([&] { rc = cmd_discrete(o); });
    }
    {
        Options& o = fresh();
        CLI::App* exp =
            app.add_subcommand("export", "write a function document or mesh samples");
        exp->add_option("selector", o.selector, "f:n:k:i | F:n:k | g:n:j | @file.json")
            ->required();
        exp->add_option("--mesh", o.mesh, "sample on i/mesh instead of exporting segments")
            ->capture_default_str();
        add_output(exp, o);
        exp->callback([&] { rc = cmd_export(o); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 64;
    }
    return rc;
}
