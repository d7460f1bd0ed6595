#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "report.hpp"
#include "seqspace.hpp"

namespace weakl1 {

// Insertion-ordered documents keep key order deterministic, so a rerun with
// the same inputs reproduces the output file byte for byte.
using ordered_json = nlohmann::ordered_json;

inline ordered_json interval_to_json(const RatInterval& iv) {
    ordered_json j;
    j["lo"] = iv.lo.str();
    j["hi"] = iv.hi.str();
    return j;
}

// Interval object with decimal renderings alongside the exact endpoints.
// The decimals are presentation only; the "p/q" strings are the record.
inline ordered_json interval_to_json_dec(const RatInterval& iv, int digits = 12) {
    ordered_json j;
    j["lo"] = iv.lo.str();
    j["hi"] = iv.hi.str();
    j["lo_dec"] = iv.lo.decimal(digits);
    j["hi_dec"] = iv.hi.decimal(digits);
    return j;
}

inline RatInterval interval_from_json(const ordered_json& j) {
    if (!j.is_object() || !j.contains("lo") || !j.contains("hi") || !j["lo"].is_string() ||
        !j["hi"].is_string())
        throw parse_error("interval: expected {\"lo\": \"p/q\", \"hi\": \"p/q\"}");
    return RatInterval(Rational::parse(j["lo"].get<std::string>()),
                       Rational::parse(j["hi"].get<std::string>()));
}

namespace detail {

inline Rational rat_field(const ordered_json& j, const char* key, const char* where) {
    if (!j.contains(key) || !j[key].is_string())
        throw parse_error(std::string(where) + ": missing or non-string \"" + key + "\"");
    return Rational::parse(j[key].get<std::string>());
}

// RFC 4180 quoting, applied only when the field needs it.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

// A function document is a list of segment objects
//   {"a": "p/q", "b": "p/q", "constant": "p/q", "terms": [{"coeff", "shift"}]}
// with "terms" omitted when empty.
inline ordered_json function_to_json(const PiecewiseFn& f) {
    ordered_json doc = ordered_json::array();
    for (const Segment& s : f.segments()) {
        ordered_json js;
        js["a"] = s.a.str();
        js["b"] = s.b.str();
        js["constant"] = s.constant.str();
        if (!s.terms.empty()) {
            ordered_json terms = ordered_json::array();
            for (const HyperTerm& t : s.terms) {
                ordered_json jt;
                jt["coeff"] = t.coeff.str();
                jt["shift"] = t.shift.str();
                terms.push_back(std::move(jt));
            }
            js["terms"] = std::move(terms);
        }
        doc.push_back(std::move(js));
    }
    return doc;
}

// Accepts either the bare segment list or an object wrapping it under
// "segments". Segment validation (ordering, overlap, poles) happens in the
// PiecewiseFn constructor, so malformed geometry is rejected the same way
// whether it arrives from a file or from code.
inline PiecewiseFn function_from_json(const ordered_json& doc) {
    const ordered_json* arr = &doc;
    if (doc.is_object()) {
        if (!doc.contains("segments"))
            throw parse_error("function document: object form needs a \"segments\" list");
        arr = &doc.at("segments");
    }
    if (!arr->is_array()) throw parse_error("function document: expected a segment list");
    std::vector<Segment> segs;
    segs.reserve(arr->size());
    for (const ordered_json& js : *arr) {
        if (!js.is_object()) throw parse_error("segment: expected an object");
        Segment s;
        s.a = detail::rat_field(js, "a", "segment");
        s.b = detail::rat_field(js, "b", "segment");
        s.constant = detail::rat_field(js, "constant", "segment");
        if (js.contains("terms")) {
            if (!js["terms"].is_array()) throw parse_error("segment: \"terms\" must be a list");
            for (const ordered_json& jt : js["terms"]) {
                if (!jt.is_object()) throw parse_error("term: expected an object");
                s.terms.push_back(HyperTerm{detail::rat_field(jt, "coeff", "term"),
                                            detail::rat_field(jt, "shift", "term")});
            }
        }
        segs.push_back(std::move(s));
    }
    return PiecewiseFn(std::move(segs));
}

inline ordered_json seq_to_json(const FiniteSeq& x) {
    ordered_json doc = ordered_json::array();
    for (const Rational& v : x.values) doc.push_back(v.str());
    return doc;
}

inline FiniteSeq seq_from_json(const ordered_json& doc) {
    if (!doc.is_array()) throw parse_error("sequence document: expected a list of \"p/q\" strings");
    FiniteSeq x;
    x.values.reserve(doc.size());
    for (const ordered_json& jv : doc) {
        if (!jv.is_string()) throw parse_error("sequence document: entries must be strings");
        x.values.push_back(Rational::parse(jv.get<std::string>()));
    }
    return x;
}

// One row per index: the value and the same-rank entry of the non-increasing
// rearrangement, each as exact "p/q" plus a decimal column for plotting.
inline std::string seq_to_csv(const FiniteSeq& x) {
    FiniteSeq sorted = seq_rearrange(x);
    std::string out = "index,value,value_dec,rearranged,rearranged_dec\n";
    for (size_t i = 0; i < x.values.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += x.values[i].str();
        out += ',';
        out += x.values[i].decimal();
        out += ',';
        out += sorted.values[i].str();
        out += ',';
        out += sorted.values[i].decimal();
        out += '\n';
    }
    return out;
}

inline ordered_json report_to_json(const ProbeReport& rep) {
    ordered_json j;
    j["kind"] = rep.kind;
    j["n"] = rep.n;
    j["N"] = rep.N;
    j["M"] = rep.M;
    j["tol"] = rep.tol.str();
    j["sign_mode"] = rep.sign_mode;
    if (rep.has_window) {
        j["window_lo"] = interval_to_json_dec(rep.window_lo);
        j["window_hi"] = interval_to_json_dec(rep.window_hi);
    }
    ordered_json rows = ordered_json::array();
    for (const ProbeRow& r : rep.rows) {
        ordered_json jr;
        jr["label"] = r.label;
        jr["enc"] = interval_to_json_dec(r.enc);
        jr["verdict"] = verdict_name(r.verdict);
        if (!r.note.empty()) jr["note"] = r.note;
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    if (rep.has_average) j["average"] = interval_to_json_dec(rep.average);
    if (rep.has_ratio) {
        j["ratio"] = interval_to_json_dec(rep.ratio);
        j["ratio_bound"] = interval_to_json_dec(rep.ratio_bound);
        j["ratio_verdict"] = verdict_name(rep.ratio_verdict);
    }
    j["notes"] = rep.notes;
    j["overall"] = verdict_name(rep.overall);
    return j;
}

// Row table only; per-run metadata lives in the JSON form (or in the leading
// comment lines the command-line tool writes above this block).
inline std::string report_to_csv(const ProbeReport& rep) {
    std::string out = "label,lo,hi,lo_dec,hi_dec,verdict,note\n";
    for (const ProbeRow& r : rep.rows) {
        out += detail::csv_field(r.label);
        out += ',';
        out += r.enc.lo.str();
        out += ',';
        out += r.enc.hi.str();
        out += ',';
        out += r.enc.lo.decimal();
        out += ',';
        out += r.enc.hi.decimal();
        out += ',';
        out += verdict_name(r.verdict);
        out += ',';
        out += detail::csv_field(r.note);
        out += '\n';
    }
    return out;
}

} // namespace weakl1
