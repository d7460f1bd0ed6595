#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "construction.hpp"
#include "report.hpp"

namespace weakl1 {

// Finite sequence of exact rationals, 1-based in the math, 0 beyond the end.
struct FiniteSeq {
    std::vector<Rational> values;
};

// Absolute values sorted in non-increasing order. For the step function
// sum x(i) chi_[i-1,i) this equals sampling its decreasing rearrangement at
// the integers, which is why no separate construction is needed.
inline FiniteSeq seq_rearrange(const FiniteSeq& x) {
    std::vector<Rational> v;
    v.reserve(x.values.size());
    for (const auto& r : x.values) v.push_back(r.abs());
    std::sort(v.begin(), v.end(), [](const Rational& a, const Rational& b) { return b < a; });
    return FiniteSeq{std::move(v)};
}

// sup_k k * x*(k), exact; 0 for the empty sequence.
inline Rational seq_weak_norm(const FiniteSeq& x) {
    FiniteSeq s = seq_rearrange(x);
    Rational best(0);
    for (size_t k = 0; k < s.values.size(); ++k) {
        Rational cand = Rational(static_cast<long>(k) + 1) * s.values[k];
        if (cand > best) best = cand;
    }
    return best;
}

namespace detail {

inline long mesh_count(const ConstructionParams& p, long n_cap) {
    if (p.n > n_cap)
        throw size_budget_error(
            "discrete_family: n^(2^(n-1)) entries exceed the materialization cap; "
            "use the continuum verifier for this n");
    mpz_class L;
    mpz_ui_pow_ui(L.get_mpz_t(), static_cast<unsigned long>(p.n),
                  static_cast<unsigned long>(p.M));
    if (!L.fits_slong_p()) throw size_budget_error("discrete_family: mesh count overflows");
    return L.get_si();
}

} // namespace detail

// Right-endpoint sampling of the diagonal family on the uniform mesh 1/L,
// L = n^M. The mesh contains every breakpoint of the construction, so each
// sample lies inside one monotone piece.
inline std::vector<FiniteSeq> discrete_family(const ConstructionParams& p, long n_cap = 4) {
    long L = detail::mesh_count(p, n_cap);
    std::vector<FiniteSeq> out;
    out.reserve(static_cast<size_t>(p.N));
    for (long j = 1; j <= p.N; ++j) {
        PiecewiseFn g = make_g(p, j);
        FiniteSeq x;
        x.values.reserve(static_cast<size_t>(L));
        for (long i = 1; i <= L; ++i) x.values.push_back(eval_exact(g, Rational(i, L)));
        out.push_back(std::move(x));
    }
    return out;
}

// Exhaustive exact norm table for the sampled family: for every sign vector
// eta the quantity seq_weak_norm(sum eta_j x_j)/L is computed exactly and its
// certified position relative to [ (1/2) n ln n, n ln n ] is reported. The
// positions are informational: the continuum lemma is claimed only for large
// n, and nothing is asserted about the sampled analog.
inline ProbeReport verify_discrete_lemma(const ConstructionParams& p, long n_cap = 4) {
    long L = detail::mesh_count(p, n_cap);
    std::vector<FiniteSeq> xs = discrete_family(p, n_cap);
    LemmaWindow w = lemma_window(p.n, Rational(1, 1000000000000L));

    ProbeReport rep;
    rep.kind = "discrete";
    rep.n = p.n;
    rep.N = p.N;
    rep.M = p.M;
    rep.sign_mode = "all";
    rep.has_window = true;
    rep.window_lo = w.half;
    rep.window_hi = w.full;
    rep.notes.push_back("norms are seq_weak_norm(sum eta_j x_j)/L with L = n^M (counting "
                        "measure mapped to mesh 1/L)");
    rep.notes.push_back("window positions are informational; the lemma asserts nothing at "
                        "sampled scale");

    for (const SignVector& eta : make_sign_rows(p.N)) {
        FiniteSeq combo;
        combo.values.assign(static_cast<size_t>(L), Rational(0));
        for (long j = 0; j < p.N; ++j) {
            const auto& vj = xs[static_cast<size_t>(j)].values;
            for (long i = 0; i < L; ++i) {
                if (eta[static_cast<size_t>(j)] > 0)
                    combo.values[static_cast<size_t>(i)] += vj[static_cast<size_t>(i)];
                else
                    combo.values[static_cast<size_t>(i)] -= vj[static_cast<size_t>(i)];
            }
        }
        Rational norm = seq_weak_norm(combo) / Rational(L);

        ProbeRow row;
        row.label.reserve(static_cast<size_t>(p.N) + 4);
        row.label = "eta=";
        for (int s : eta) row.label += (s > 0 ? '+' : '-');
        row.enc = RatInterval{norm, norm};
        if (norm < w.half.lo) {
            row.verdict = Verdict::Pass;
            row.note = "below window (informational)";
        } else if (norm > w.half.hi && norm < w.full.lo) {
            row.verdict = Verdict::Pass;
            row.note = "inside window (informational)";
        } else if (norm > w.full.hi) {
            row.verdict = Verdict::Pass;
            row.note = "above window (informational)";
        } else {
            row.verdict = Verdict::Inconclusive;
            row.note = "norm falls inside a window-endpoint enclosure; tighten ln targets";
        }
        rep.rows.push_back(std::move(row));
    }
    rep.overall = Verdict::Pass;
    for (const auto& r : rep.rows)
        if (r.verdict == Verdict::Inconclusive) rep.overall = Verdict::Inconclusive;
    return rep;
}

} // namespace weakl1
