#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "interval.hpp"

namespace weakl1 {

// One reciprocal term w/(t + s). The carrying segment must satisfy a + s > 0
// so the term is finite and monotone on the whole piece.
struct HyperTerm {
    Rational coeff;
    Rational shift;

    friend bool operator==(const HyperTerm& x, const HyperTerm& y) {
        return x.coeff == y.coeff && x.shift == y.shift;
    }
};

// Half-open piece (a, b] with value constant + sum_i coeff_i/(t + shift_i).
struct Segment {
    Rational a, b;
    Rational constant;
    std::vector<HyperTerm> terms;

    Rational length() const { return b - a; }

    // exact value of this segment's expression at t (t need not lie inside)
    Rational expression_at(const Rational& t) const {
        Rational v = constant;
        for (const auto& term : terms) v += term.coeff / (t + term.shift);
        return v;
    }

    // range enclosure of the expression over [lo, hi] subset of [a, b]; each
    // term is monotone there, so per-term ranges are exact and the sum is the
    // only source of slack
    RatInterval expression_range(const Rational& lo, const Rational& hi) const {
        RatInterval acc((Rational(constant)));
        for (const auto& term : terms) {
            Rational at_lo = term.coeff / (lo + term.shift);
            Rational at_hi = term.coeff / (hi + term.shift);
            if (at_lo <= at_hi) acc = acc + RatInterval(at_lo, at_hi);
            else acc = acc + RatInterval(at_hi, at_lo);
        }
        return acc;
    }

    friend bool operator==(const Segment& x, const Segment& y) {
        return x.a == y.a && x.b == y.b && x.constant == y.constant && x.terms == y.terms;
    }
};

// Piecewise function on (0,1]: finitely many disjoint half-open segments,
// zero in between. Held in canonical form: segments sorted, terms sorted by
// shift with duplicates merged, zero terms and zero segments dropped,
// adjacent identical pieces coalesced.
class PiecewiseFn {
  public:
    PiecewiseFn() = default; // zero function

    explicit PiecewiseFn(std::vector<Segment> segs) : segs_(std::move(segs)) { normalize_(); }

    const std::vector<Segment>& segments() const { return segs_; }
    bool is_zero() const { return segs_.empty(); }

    bool is_step() const {
        return std::all_of(segs_.begin(), segs_.end(),
                           [](const Segment& s) { return s.terms.empty(); });
    }

    // measure of the union of segments (the function is nonzero a.e. there)
    Rational support_measure() const {
        Rational m(0);
        for (const auto& s : segs_) m += s.length();
        return m;
    }

    // index of the segment whose (a,b] contains t, or -1
    long segment_index_at(const Rational& t) const {
        long lo = 0, hi = static_cast<long>(segs_.size()) - 1;
        while (lo <= hi) {
            long mid = (lo + hi) / 2;
            if (t <= segs_[mid].a) hi = mid - 1;
            else if (t > segs_[mid].b) lo = mid + 1;
            else return mid;
        }
        return -1;
    }

    Rational eval(const Rational& t) const {
        if (t.sign() <= 0 || t > Rational(1))
            throw invalid_parameter("eval: point outside (0,1]");
        long idx = segment_index_at(t);
        if (idx < 0) return Rational(0);
        return segs_[static_cast<size_t>(idx)].expression_at(t);
    }

    // Range enclosure over T = [lo, hi]. T must lie inside one segment's
    // closure or entirely between segments; straddling a breakpoint is a
    // caller error (keeps per-term monotonicity analysis exact).
    RatInterval eval_range(const Rational& lo, const Rational& hi) const {
        if (lo.sign() <= 0 || hi > Rational(1) || lo > hi)
            throw invalid_parameter("eval_range: bad interval");
        for (const auto& s : segs_) {
            if (s.a <= lo && hi <= s.b) return s.expression_range(lo, hi);
        }
        for (const auto& s : segs_) {
            bool disjoint = (hi <= s.a) || (lo > s.b);
            if (!disjoint)
                throw segment_error("eval_range: interval straddles a breakpoint");
        }
        return RatInterval(Rational(0));
    }

    // certified bound on sup |f|
    Rational sup_abs_bound() const {
        Rational m(0);
        for (const auto& s : segs_) {
            RatInterval r = s.expression_range(s.a, s.b).abs();
            m = std::max(m, r.hi);
        }
        return m;
    }

    friend bool operator==(const PiecewiseFn& x, const PiecewiseFn& y) {
        return x.segs_ == y.segs_;
    }

  private:
    void normalize_() {
        std::vector<Segment> keep;
        keep.reserve(segs_.size());
        for (Segment& s : segs_) {
            if (!(Rational(0) <= s.a && s.a < s.b && s.b <= Rational(1)))
                throw segment_error("segment endpoints must satisfy 0 <= a < b <= 1");
            std::sort(s.terms.begin(), s.terms.end(),
                      [](const HyperTerm& x, const HyperTerm& y) { return x.shift < y.shift; });
            std::vector<HyperTerm> merged;
            for (const auto& t : s.terms) {
                if (!merged.empty() && merged.back().shift == t.shift) merged.back().coeff += t.coeff;
                else merged.push_back(t);
            }
            std::erase_if(merged, [](const HyperTerm& t) { return t.coeff.is_zero(); });
            for (const auto& t : merged) {
                if ((s.a + t.shift).sign() <= 0)
                    throw segment_error("term pole touches segment closure (a + shift <= 0)");
            }
            s.terms = std::move(merged);
            if (s.terms.empty() && s.constant.is_zero()) continue;
            keep.push_back(std::move(s));
        }
        std::sort(keep.begin(), keep.end(),
                  [](const Segment& x, const Segment& y) { return x.a < y.a; });
        for (size_t i = 0; i + 1 < keep.size(); ++i) {
            if (keep[i].b > keep[i + 1].a) throw segment_error("segments overlap");
        }
        std::vector<Segment> out;
        out.reserve(keep.size());
        for (Segment& s : keep) {
            if (!out.empty() && out.back().b == s.a && out.back().constant == s.constant &&
                out.back().terms == s.terms) {
                out.back().b = s.b;
            } else {
                out.push_back(std::move(s));
            }
        }
        segs_ = std::move(out);
    }

    std::vector<Segment> segs_;
};

inline Rational eval_exact(const PiecewiseFn& f, const Rational& t) { return f.eval(t); }

inline RatInterval eval_interval(const PiecewiseFn& f, const Rational& lo, const Rational& hi) {
    return f.eval_range(lo, hi);
}

// Pointwise sum on the common refinement of the two breakpoint sets.
inline PiecewiseFn add(const PiecewiseFn& f, const PiecewiseFn& g) {
    std::vector<Rational> cuts;
    for (const auto* fn : {&f, &g}) {
        for (const auto& s : fn->segments()) {
            cuts.push_back(s.a);
            cuts.push_back(s.b);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Segment> out;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        const Rational &p = cuts[i], &q = cuts[i + 1];
        Segment merged{p, q, Rational(0), {}};
        bool any = false;
        for (const auto* fn : {&f, &g}) {
            for (const auto& s : fn->segments()) {
                if (s.a <= p && q <= s.b) {
                    any = true;
                    merged.constant += s.constant;
                    merged.terms.insert(merged.terms.end(), s.terms.begin(), s.terms.end());
                }
            }
        }
        if (any) out.push_back(std::move(merged));
    }
    return PiecewiseFn(std::move(out));
}

inline PiecewiseFn scale(const PiecewiseFn& f, const Rational& c) {
    if (c.is_zero()) return PiecewiseFn();
    std::vector<Segment> out = f.segments();
    for (auto& s : out) {
        s.constant *= c;
        for (auto& t : s.terms) t.coeff *= c;
    }
    return PiecewiseFn(std::move(out));
}

// Restriction to the window (a, b]; everything outside becomes zero.
inline PiecewiseFn restrict(const PiecewiseFn& f, const Rational& a, const Rational& b) {
    if (!(Rational(0) <= a && a < b && b <= Rational(1)))
        throw invalid_parameter("restrict: window must satisfy 0 <= a < b <= 1");
    std::vector<Segment> out;
    for (const auto& s : f.segments()) {
        Rational na = std::max(a, s.a), nb = std::min(b, s.b);
        if (na < nb) {
            Segment clipped = s;
            clipped.a = na;
            clipped.b = nb;
            out.push_back(std::move(clipped));
        }
    }
    return PiecewiseFn(std::move(out));
}

// Step function: a PiecewiseFn whose segments carry constants only.
struct StepFn {
    PiecewiseFn fn;

    StepFn() = default;
    explicit StepFn(PiecewiseFn f) : fn(std::move(f)) {
        if (!fn.is_step()) throw invalid_parameter("StepFn: function has reciprocal terms");
    }
};

// Step function from breakpoints 0 <= b0 < b1 < ... < bm <= 1 and the m
// values taken on (b_{i}, b_{i+1}].
inline StepFn make_step(const std::vector<Rational>& breaks, const std::vector<Rational>& values) {
    if (breaks.size() != values.size() + 1 || values.empty())
        throw invalid_parameter("make_step: need m+1 breakpoints for m values");
    std::vector<Segment> segs;
    for (size_t i = 0; i < values.size(); ++i)
        segs.push_back(Segment{breaks[i], breaks[i + 1], values[i], {}});
    return StepFn(PiecewiseFn(std::move(segs)));
}

// Exact weak quasi-norm of a step function: with distinct nonzero levels
// v_1 > v_2 > ... and m_k the measure where |f| >= v_k, the supremum of
// lambda * |{|f| > lambda}| is max_k v_k * m_k (approached from the left at
// each level, attained unless the max level set is approached by a jump).
inline Rational step_norm_exact(const StepFn& sf) {
    std::vector<std::pair<Rational, Rational>> lv; // (|value|, length)
    for (const auto& s : sf.fn.segments()) {
        if (!s.constant.is_zero()) lv.emplace_back(s.constant.abs(), s.length());
    }
    std::sort(lv.begin(), lv.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    Rational best(0), cum(0);
    size_t i = 0;
    while (i < lv.size()) {
        const Rational& v = lv[i].first;
        while (i < lv.size() && lv[i].first == v) {
            cum += lv[i].second;
            ++i;
        }
        best = std::max(best, v * cum);
    }
    return best;
}

} // namespace weakl1
