// End-to-end acceptance gate. Each criterion prints exactly one PASS/FAIL
// line with its key numbers and wall time; the process exits 0 only if every
// criterion passes. Tolerances and runtime caps are pinned here on purpose:
// loosening them is a visible diff, not a flag.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "weakl1/seqspace.hpp"
#include "weakl1/typeprobe.hpp"
#include "weakl1/weak_norm.hpp"

using namespace weakl1;
using Clock = std::chrono::steady_clock;

namespace {

Rational R(long n, long d = 1) { return Rational(n, d); }

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        pass = false;
        if (!detail.empty()) detail += "; ";
        detail += why;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

bool intervals_intersect(const RatInterval& a, const RatInterval& b) {
    return !(a.hi < b.lo) && !(b.hi < a.lo);
}

std::string iv_str(const RatInterval& iv, int digits = 8) {
    return "[" + iv.lo.decimal(digits) + ", " + iv.hi.decimal(digits) + "]";
}

// ------------------------------------------------------------------ C1

Outcome criterion_norm_window() {
    Outcome out;
    ConstructionParams p = ConstructionParams::make(10);
    LemmaWindow w = lemma_window(10, R(1, 1000000000000L));
    for (long k = 1; k <= 2; ++k) {
        Clock::time_point t0 = Clock::now();
        RatInterval enc = weak_norm(make_F_k(p, k), R(1, 1000000));
        double dt = elapsed(t0);
        bool above = cmp_certified(enc, w.half) == Cmp::Greater;
        bool below = cmp_certified(enc, w.full) == Cmp::Less;
        if (!above) out.fail("k=" + std::to_string(k) + " not certified above the half target");
        if (!below) out.fail("k=" + std::to_string(k) + " not certified below the full target");
        if (dt > 60.0) out.fail("k=" + std::to_string(k) + " exceeded 60 s");
        out.note("k=" + std::to_string(k) + " " + iv_str(enc));
    }
    out.note("window " + w.half.hi.decimal(6) + " .. " + w.full.lo.decimal(6));
    return out;
}

// ------------------------------------------------------------------ C2

Outcome criterion_unit_norms() {
    Outcome out;
    Clock::time_point t0 = Clock::now();
    ProbeBudget b;
    long members = 0;
    for (long n : {3L, 4L, 6L, 10L}) {
        ProbeReport rep = verify_unit_norms(ConstructionParams::make(n), b);
        members += static_cast<long>(rep.rows.size());
        if (rep.overall != Verdict::Pass)
            out.fail("n=" + std::to_string(n) + " overall " + verdict_name(rep.overall));
        for (const ProbeRow& r : rep.rows)
            if (r.verdict != Verdict::Pass)
                out.fail("n=" + std::to_string(n) + " " + r.label + " " + verdict_name(r.verdict));
    }
    double dt = elapsed(t0);
    if (dt > 300.0) out.fail("exceeded 300 s");
    out.note(std::to_string(members) + " members certified at or below 1 with exact deficits");
    return out;
}

// ------------------------------------------------------------------ C3

Outcome criterion_sign_window_table() {
    Outcome out;
    ProbeBudget b;
    b.tol = R(1, 10000);

    Clock::time_point t0 = Clock::now();
    ProbeReport full = verify_lemma(ConstructionParams::make(10), b);
    double dt10 = elapsed(t0);
    long pass10 = 0;
    for (const ProbeRow& r : full.rows)
        if (r.verdict == Verdict::Pass) ++pass10;
    if (full.rows.size() != 512)
        out.fail("expected 512 rows, got " + std::to_string(full.rows.size()));
    if (pass10 != static_cast<long>(full.rows.size()))
        out.fail("n=10: only " + std::to_string(pass10) + " rows pass");
    if (full.overall != Verdict::Pass) out.fail("n=10 overall not Pass");
    if (dt10 > 3600.0) out.fail("n=10 exceeded 3600 s");

    Clock::time_point t1 = Clock::now();
    ProbeReport fast = verify_lemma(ConstructionParams::make(6), b);
    double dt6 = elapsed(t1);
    if (fast.rows.size() != 32)
        out.fail("fast lane expected 32 rows, got " + std::to_string(fast.rows.size()));
    if (fast.overall != Verdict::Pass) out.fail("n=6 upper-bound verdicts not all Pass");
    bool lower_reported = true;
    for (const ProbeRow& r : fast.rows)
        if (r.note.find("lower target") == std::string::npos) lower_reported = false;
    if (!lower_reported) out.fail("n=6 rows do not report the lower-bound position");
    if (dt6 > 120.0) out.fail("n=6 exceeded 120 s");

    char buf[160];
    std::snprintf(buf, sizeof buf, "512/512 rows pass in %.0f s; fast lane 32/32 in %.1f s", dt10,
                  dt6);
    out.note(buf);
    return out;
}

// ------------------------------------------------------------------ C4

Outcome criterion_ratio_growth() {
    Outcome out;
    ProbeBudget b;
    b.tol = R(1, 10000);

    std::vector<ProbeReport> reps;
    for (long n : {4L, 6L, 8L, 10L}) reps.push_back(type1_ratio_report(ConstructionParams::make(n), b));

    const ProbeReport& ten = reps.back();
    if (ten.ratio_verdict != Verdict::Pass)
        out.fail("n=10 ratio not certified above its target");
    for (size_t i = 0; i + 1 < reps.size(); ++i) {
        if (cmp_certified(reps[i].ratio, reps[i + 1].ratio) != Cmp::Less)
            out.fail("ratio not certified increasing from n=" + std::to_string(reps[i].n) +
                     " to n=" + std::to_string(reps[i + 1].n));
    }
    std::string chain;
    for (const ProbeReport& r : reps) {
        if (!chain.empty()) chain += " < ";
        chain += r.ratio.lo.decimal(6);
    }
    out.note("ratios " + chain + "; n=10 target " + ten.ratio_bound.hi.decimal(6));
    return out;
}

// ------------------------------------------------------------------ C5

Outcome criterion_rearrangement_closed_form() {
    Outcome out;
    ProbeBudget b;
    long rows = 0;
    for (long n : {3L, 4L}) {
        ConstructionParams p = ConstructionParams::make(n);
        Rational cutoff = R(1) - pow_int(R(n), -p.M);
        std::vector<Rational> pts;
        for (long i = 1; i <= 50; ++i) pts.emplace_back(i, 51);
        pts.push_back(cutoff);                       // first point of the zero tail
        pts.push_back((cutoff + R(1)) / R(2));       // strictly beyond the support
        for (long j = 1; j <= p.N; ++j) {
            ProbeReport rep = verify_gstar(p, j, pts, b);
            rows += static_cast<long>(rep.rows.size());
            if (rep.overall != Verdict::Pass)
                out.fail("n=" + std::to_string(n) + " j=" + std::to_string(j) + " overall " +
                         verdict_name(rep.overall));
        }
    }
    out.note(std::to_string(rows) + " grid points enclose the reciprocal form, 0 past the tail");
    return out;
}

// ------------------------------------------------------------------ C6

Rational rand_rat(std::mt19937_64& rng, long lo_num, long hi_num, long hi_den) {
    std::uniform_int_distribution<long> num(lo_num, hi_num), den(1, hi_den);
    return R(num(rng), den(rng));
}

PiecewiseFn random_step(std::mt19937_64& rng, int max_pieces = 6) {
    std::uniform_int_distribution<int> pieces(1, max_pieces);
    std::uniform_int_distribution<long> cutpick(1, 119);
    int m = pieces(rng);
    std::set<Rational> cutset;
    while (static_cast<int>(cutset.size()) < m + 1) cutset.insert(R(cutpick(rng), 120));
    std::vector<Rational> cuts(cutset.begin(), cutset.end());
    std::vector<Segment> segs;
    std::uniform_int_distribution<int> skip(0, 3);
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (skip(rng) == 0) continue; // leave a gap
        segs.push_back(Segment{cuts[i], cuts[i + 1], rand_rat(rng, -40, 40, 12), {}});
    }
    return PiecewiseFn(std::move(segs));
}

// exact weak norm of a step function: sort plateau values by absolute size
// and take the best value-times-cumulative-length product
Rational step_norm_oracle(const PiecewiseFn& f) {
    std::vector<std::pair<Rational, Rational>> plats; // (|value|, length)
    for (const Segment& s : f.segments()) {
        if (s.constant.is_zero()) continue;
        plats.emplace_back(s.constant.abs(), s.length());
    }
    std::sort(plats.begin(), plats.end(),
              [](const auto& a, const auto& b) { return b.first < a.first; });
    Rational cum(0), best(0);
    for (const auto& [v, len] : plats) {
        cum += len;
        Rational cand = v * cum;
        if (best < cand) best = cand;
    }
    return best;
}

Outcome suite_step_norm_oracle(std::mt19937_64& rng) {
    Outcome out;
    for (int it = 0; it < 1000; ++it) {
        PiecewiseFn f = random_step(rng);
        Rational expect = step_norm_oracle(f);
        RatInterval enc = weak_norm(f, R(1, 1000000));
        if (!enc.contains(expect)) {
            out.fail("case " + std::to_string(it) + ": enclosure misses the exact value");
            break;
        }
    }
    out.note("1000 random step functions");
    return out;
}

Outcome suite_homogeneity(std::mt19937_64& rng) {
    Outcome out;
    ConstructionParams p3 = ConstructionParams::make(3);
    std::vector<PiecewiseFn> curved = {make_F_k(p3, 1), make_g(p3, 1), make_g(p3, 2)};
    for (int it = 0; it < 1000; ++it) {
        PiecewiseFn f = it % 20 == 0 ? curved[static_cast<size_t>(it / 20) % curved.size()]
                                     : random_step(rng);
        Rational c = rand_rat(rng, -30, 30, 10);
        RatInterval lhs = weak_norm(scale(f, c), R(1, 1000000));
        RatInterval base = weak_norm(f, R(1, 1000000));
        RatInterval rhs(c.abs() * base.lo, c.abs() * base.hi);
        if (!intervals_intersect(lhs, rhs)) {
            out.fail("case " + std::to_string(it) + ": scaled enclosure drifted");
            break;
        }
    }
    out.note("1000 scalings across step and curved functions");
    return out;
}

Outcome suite_equimeasurability(std::mt19937_64& rng) {
    Outcome out;
    std::uniform_int_distribution<long> numer(1, 63);
    for (int it = 0; it < 1000; ++it) {
        PiecewiseFn f = random_step(rng);
        // exact rearrangement of a step function: plateaus sorted by size
        std::vector<std::pair<Rational, Rational>> plats;
        for (const Segment& s : f.segments())
            if (!s.constant.is_zero()) plats.emplace_back(s.constant.abs(), s.length());
        std::sort(plats.begin(), plats.end(),
                  [](const auto& a, const auto& b) { return b.first < a.first; });
        Rational total(0);
        for (const auto& pl : plats) total += pl.second;

        // sample strictly inside one plateau of the rearranged axis (or past
        // the support), where the exact value is unambiguous
        Rational t, expect;
        if (plats.empty() || it % 10 == 0) {
            t = total + (R(1) - total) * R(numer(rng), 64);
            if (!(t < R(1))) t = (total + R(1)) / R(2);
            if (t.is_zero() || !(t < R(1))) continue;
            expect = R(0);
        } else {
            size_t pick = static_cast<size_t>(it) % plats.size();
            Rational start(0);
            for (size_t i = 0; i < pick; ++i) start += plats[i].second;
            t = start + plats[pick].second * R(numer(rng), 64);
            expect = plats[pick].first;
        }
        RatInterval enc = rearrangement_at(f, t, R(1, 1000000000));
        if (!enc.contains(expect)) {
            out.fail("case " + std::to_string(it) + ": rearranged value off its plateau");
            break;
        }
    }
    out.note("1000 plateau samples match the sorted exact rearrangement");
    return out;
}

Outcome suite_dual_construction() {
    Outcome out;
    long cases = 0;
    for (long n = 3; n <= 12; ++n) {
        ConstructionParams p = ConstructionParams::make(n);
        for (long k = 1; k <= 100; ++k) {
            if (!(make_F_k(p, k) == make_F_k_closed(p, k))) {
                out.fail("n=" + std::to_string(n) + " k=" + std::to_string(k) +
                         ": the two construction routes differ");
                return out;
            }
            ++cases;
        }
    }
    out.note(std::to_string(cases) + " (n,k) pairs agree exactly");
    return out;
}

Outcome suite_sign_swap() {
    Outcome out;
    long cases = 0;
    for (long n = 3; n <= 10; ++n) {
        ConstructionParams p = ConstructionParams::make(n);
        SignMatrix E = make_sign_matrix(p);
        for (const SignVector& eta : make_sign_rows(p.N)) {
            PiecewiseFn h = combine_signs(p, eta, E);
            SignVector neg = eta;
            for (int& s : neg) s = -s;
            if (!(combine_signs(p, neg, E) == scale(h, R(-1)))) {
                out.fail("n=" + std::to_string(n) + ": negated signs are not the negation");
                return out;
            }
            ++cases;
        }
    }
    out.note(std::to_string(cases) + " sign vectors over the full n=3..10 grids");
    return out;
}

Outcome suite_harmonic_sandwich() {
    Outcome out;
    long cases = 0;
    for (long n = 3; n <= 10; ++n) {
        ConstructionParams p = ConstructionParams::make(n);
        Rational lo_sharp(0), hi_sharp(0);
        for (long m = 2; m <= n; ++m) lo_sharp += R(1, m);
        for (long m = 1; m <= n - 1; ++m) hi_sharp += R(1, m);
        for (long k = 1; k <= 3; ++k) {
            PiecewiseFn F = make_F_k_closed(p, k);
            Rational nk = pow_int(R(n), k);
            for (long i = 1; i <= p.N; ++i) {
                for (long q = 1; q <= 8; ++q) {
                    Rational t = (R(i) + R(q, 8)) / nk;
                    Rational v = eval_exact(F, t);
                    if (v < nk * lo_sharp || nk * hi_sharp < v) {
                        out.fail("block value escapes the harmonic bounds at n=" +
                                 std::to_string(n));
                        return out;
                    }
                    ++cases;
                }
            }
        }
    }
    out.note(std::to_string(cases) + " block points inside the sharp harmonic bounds");
    return out;
}

Outcome suite_restriction(std::mt19937_64& rng) {
    Outcome out;
    ConstructionParams p3 = ConstructionParams::make(3);
    ConstructionParams p4 = ConstructionParams::make(4);
    std::vector<PiecewiseFn> pool = {make_F_k(p3, 1), make_F_k(p3, 2), make_g(p3, 1),
                                     make_F_k(p4, 1), make_g(p4, 2)};
    std::vector<RatInterval> pool_norm;
    for (const PiecewiseFn& f : pool) pool_norm.push_back(weak_norm(f, R(1, 1000000)));
    std::uniform_int_distribution<long> cutpick(1, 119);
    for (int it = 0; it < 1000; ++it) {
        bool curved = it % 5 == 0;
        size_t idx = static_cast<size_t>(it / 5) % pool.size();
        PiecewiseFn base = curved ? pool[idx] : random_step(rng);
        Rational a = R(cutpick(rng), 120), b = R(cutpick(rng), 120);
        if (b < a) std::swap(a, b);
        if (a == b) continue;
        RatInterval whole = curved ? pool_norm[idx] : weak_norm(base, R(1, 1000000));
        RatInterval part = weak_norm(restrict(base, a, b), R(1, 1000000));
        if (cmp_certified(part, whole) == Cmp::Greater) {
            out.fail("case " + std::to_string(it) + ": restriction increased the norm");
            break;
        }
    }
    out.note("1000 random windows never increase the norm");
    return out;
}

Outcome suite_sequences(std::mt19937_64& rng) {
    Outcome out;
    std::uniform_int_distribution<int> len(0, 12);
    for (int it = 0; it < 1000; ++it) {
        FiniteSeq x;
        int L = len(rng);
        for (int i = 0; i < L; ++i) x.values.push_back(rand_rat(rng, -50, 50, 40));

        Rational c = rand_rat(rng, -20, 20, 8);
        FiniteSeq cx;
        for (const Rational& v : x.values) cx.values.push_back(c * v);
        if (!(seq_weak_norm(cx) == c.abs() * seq_weak_norm(x))) {
            out.fail("scaling identity failed");
            break;
        }

        FiniteSeq perm = x;
        std::shuffle(perm.values.begin(), perm.values.end(), rng);
        if (!(seq_weak_norm(perm) == seq_weak_norm(x))) {
            out.fail("permutation invariance failed");
            break;
        }

        Rational l1(0);
        for (const Rational& v : x.values) l1 += v.abs();
        if (seq_weak_norm(x) > l1) {
            out.fail("summable domination failed");
            break;
        }
    }
    out.note("1000 sequences: scaling, permutation, summable domination");
    return out;
}

// independent double-precision route: per-segment midpoint sampling with a
// half-cell correction on the cumulative measure
double float_norm_estimate(const PiecewiseFn& f, long q) {
    struct WV {
        double v, w;
    };
    std::vector<WV> samples;
    samples.reserve(f.segments().size() * static_cast<size_t>(q));
    for (const Segment& s : f.segments()) {
        double a = s.a.to_double(), b = s.b.to_double();
        double w = (b - a) / static_cast<double>(q);
        double c = s.constant.to_double();
        std::vector<std::pair<double, double>> terms;
        terms.reserve(s.terms.size());
        for (const HyperTerm& t : s.terms)
            terms.emplace_back(t.coeff.to_double(), t.shift.to_double());
        for (long i = 0; i < q; ++i) {
            double t = a + (static_cast<double>(2 * i + 1) / static_cast<double>(2 * q)) * (b - a);
            double v = c;
            for (const auto& [co, sh] : terms) v += co / (t + sh);
            samples.push_back({std::fabs(v), w});
        }
    }
    std::sort(samples.begin(), samples.end(), [](const WV& x, const WV& y) { return x.v > y.v; });
    double cum = 0, best = 0;
    for (const WV& s : samples) {
        cum += s.w;
        best = std::max(best, s.v * (cum - 0.5 * s.w));
    }
    return best;
}

Outcome suite_float_oracle() {
    Outcome out;
    const double slack = 0.005; // calibrated: observed deviation stays under 0.001
    long cases = 0;
    double worst = 0.0;
    for (long n = 3; n <= 6; ++n) {
        ConstructionParams p = ConstructionParams::make(n);
        SignMatrix E = make_sign_matrix(p);
        std::vector<PiecewiseFn> fns;
        for (long k = 1; k <= 52; ++k) {
            for (long i = 1; i <= p.N; ++i) fns.push_back(make_f_ki(p, k, i));
            fns.push_back(make_F_k(p, k));
        }
        for (long j = 1; j <= p.N; ++j) fns.push_back(make_g(p, j));
        for (const SignVector& eta : make_sign_rows(p.N))
            fns.push_back(combine_signs(p, eta, E));
        for (const PiecewiseFn& f : fns) {
            double est = float_norm_estimate(f, 200);
            RatInterval enc = weak_norm(f, R(1, 10000));
            double lo = enc.lo.to_double() * (1.0 - slack);
            double hi = enc.hi.to_double() * (1.0 + slack);
            if (est < lo || est > hi) {
                out.fail("n=" + std::to_string(n) + ": float estimate " + std::to_string(est) +
                         " outside " + iv_str(enc));
                return out;
            }
            worst = std::max({worst, enc.lo.to_double() / est - 1.0,
                              est / enc.hi.to_double() - 1.0});
            ++cases;
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld functions, worst deviation %.2e (slack 5e-3)", cases,
                  worst);
    out.note(buf);
    return out;
}

Outcome criterion_property_suites() {
    Outcome out;
    std::mt19937_64 rng(20260814);
    struct Named {
        const char* name;
        Outcome result;
    };
    std::vector<Named> suites;
    suites.push_back({"step-norm", suite_step_norm_oracle(rng)});
    suites.push_back({"homogeneity", suite_homogeneity(rng)});
    suites.push_back({"equimeasurability", suite_equimeasurability(rng)});
    suites.push_back({"dual-construction", suite_dual_construction()});
    suites.push_back({"sign-swap", suite_sign_swap()});
    suites.push_back({"harmonic-sandwich", suite_harmonic_sandwich()});
    suites.push_back({"restriction", suite_restriction(rng)});
    suites.push_back({"sequences", suite_sequences(rng)});
    suites.push_back({"float-oracle", suite_float_oracle()});
    long passed = 0;
    for (const Named& s : suites) {
        if (s.result.pass) {
            ++passed;
        } else {
            out.fail(std::string(s.name) + ": " + s.result.detail);
        }
    }
    out.note(std::to_string(passed) + "/" + std::to_string(suites.size()) + " suites green");
    return out;
}

// ------------------------------------------------------------------ C7

Outcome criterion_discrete_tables() {
    Outcome out;
    Clock::time_point t0 = Clock::now();
    for (long n : {3L, 4L}) {
        ProbeReport rep = verify_discrete_lemma(ConstructionParams::make(n));
        size_t expect_rows = static_cast<size_t>(1) << (n - 1);
        if (rep.rows.size() != expect_rows)
            out.fail("n=" + std::to_string(n) + ": wrong row count");
        for (const ProbeRow& r : rep.rows) {
            if (!(r.enc.lo == r.enc.hi)) {
                out.fail("n=" + std::to_string(n) + ": a table entry is not exact");
                break;
            }
            if (r.verdict != Verdict::Pass) {
                out.fail("n=" + std::to_string(n) + " " + r.label + ": " +
                         verdict_name(r.verdict));
                break;
            }
        }
    }
    double dt = elapsed(t0);
    if (dt > 300.0) out.fail("exceeded 300 s");
    char buf[96];
    std::snprintf(buf, sizeof buf, "exact tables for 4 + 8 sign vectors in %.1f s", dt);
    out.note(buf);
    return out;
}

} // namespace

int main() {
    std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
        {"C1 scaled family sums stay in the norm window", criterion_norm_window},
        {"C2 diagonal members certified at their exact deficit", criterion_unit_norms},
        {"C3 exhaustive sign table inside the window", criterion_sign_window_table},
        {"C4 average-to-sum ratio certified growing", criterion_ratio_growth},
        {"C5 rearrangement matches the reciprocal closed form", criterion_rearrangement_closed_form},
        {"C6 property suites against independent oracles", criterion_property_suites},
        {"C7 mesh-sampled exact norm tables", criterion_discrete_tables},
    };

    int failures = 0;
    for (const auto& [label, fn] : criteria) {
        Clock::time_point t0 = Clock::now();
        Outcome result = fn();
        double dt = elapsed(t0);
        std::printf("[%s] %s (%.1f s)%s%s\n", result.pass ? "PASS" : "FAIL", label, dt,
                    result.detail.empty() ? "" : ": ", result.detail.c_str());
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    if (failures == 0) {
        std::printf("all 7 criteria pass\n");
        return 0;
    }
    std::printf("%d criteria failing\n", failures);
    return 1;
}
