#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "level_measure.hpp"

namespace weakl1 {

namespace detail {

// 2^k as an exact rational
inline Rational pow2_rat(long k) {
    mpz_class shifted = mpz_class(1) << static_cast<unsigned long>(k >= 0 ? k : -k);
    if (k >= 0) return Rational(shifted);
    return Rational(mpz_class(1), shifted);
}

// For a function built only from constant pieces and single-reciprocal
// pieces, lambda * |{|f| > lambda}| is piecewise affine in lambda:
//   reciprocal piece |w|/(t+s) on (a,b]:  contributes
//     lambda*(b-a)        for lambda <= |w|/(b+s)
//     |w| - (a+s)*lambda  for |w|/(b+s) < lambda < |w|/(a+s)
//     0                   beyond,
//   constant piece: lambda*(b-a) until |value|, then 0 (a jump).
// The supremum over lambda is therefore attained among one-sided limits at
// the kinks and is computed exactly by an event sweep.
inline std::optional<Rational> exact_sweep_norm(const PiecewiseFn& f) {
    struct Event {
        Rational kappa, dalpha, dbeta;
    };
    std::vector<Event> ev;
    Rational beta(0); // sum of lengths: initial slope of lambda*d(lambda)
    for (const auto& seg : f.segments()) {
        Rational L = seg.length();
        if (seg.terms.empty()) {
            beta += L;
            ev.push_back({seg.constant.abs(), Rational(0), -L});
        } else if (seg.terms.size() == 1 && seg.constant.is_zero()) {
            const Rational w = seg.terms[0].coeff.abs();
            const Rational& sh = seg.terms[0].shift;
            beta += L;
            ev.push_back({w / (seg.b + sh), w, -(seg.b + sh)});
            ev.push_back({w / (seg.a + sh), -w, seg.a + sh});
        } else {
            return std::nullopt; // mixed or multi-term piece: no closed form
        }
    }
    std::sort(ev.begin(), ev.end(), [](const Event& x, const Event& y) { return x.kappa < y.kappa; });
    Rational alpha(0), best(0);
    size_t i = 0;
    while (i < ev.size()) {
        const Rational& k = ev[i].kappa;
        Rational phi_left = alpha + beta * k;
        if (phi_left > best) best = phi_left;
        while (i < ev.size() && ev[i].kappa == k) {
            alpha += ev[i].dalpha;
            beta += ev[i].dbeta;
            ++i;
        }
        Rational phi_right = alpha + beta * k;
        if (phi_right > best) best = phi_right;
    }
    return best;
}

} // namespace detail

// Certified enclosure of the weak quasi-norm sup_lambda lambda*|{|f|>lambda}|
// with relative width: hi - lo <= rel_tol * hi. Functions whose pieces all
// have closed-form level sets are evaluated exactly; otherwise an interval
// branch-and-bound over lambda runs against the shared measure context.
inline RatInterval weak_norm(const PiecewiseFn& f, const Rational& rel_tol,
                             long eval_budget = 400000000L) {
    if (rel_tol.sign() <= 0) throw invalid_parameter("weak_norm: rel_tol <= 0");
    if (f.is_zero()) return RatInterval(Rational(0));
    if (auto exact = detail::exact_sweep_norm(f)) return RatInterval(*exact);

    MeasureContext ctx(f);
    const Rational supp = ctx.support_measure();
    const Rational lam_max = ctx.sup_abs();
    Rational lb = ctx.quick_norm_lower_bound();

    auto dist = [&](const Rational& lam, const Rational& tol, LevelMode mode) {
        long slice = std::min<long>(1000000L, std::max<long>(eval_budget, 1L));
        long before = ctx.evals_used();
        DistResult r = ctx.distribution_best(lam, tol, mode, slice);
        // charge at least one eval so exact fast paths still drain the budget
        eval_budget -= std::max<long>(ctx.evals_used() - before, 1L);
        return r;
    };

    // left limits at jump levels (constant pieces) are candidate suprema the
    // strict-inequality probes below would only approach, never reach
    for (const Rational& kappa : ctx.jump_levels()) {
        Rational tol_j = (lb.sign() > 0 ? rel_tol * lb : rel_tol * supp) / (Rational(8) * kappa);
        DistResult r = dist(kappa, tol_j, LevelMode::AtOrAbove);
        Rational cand = kappa * r.enc.lo;
        if (cand > lb) lb = cand;
    }

    struct Box {
        Rational lo, hi;
        Rational dlo_hi; // upper bound of d at the left end
        Rational ub;     // hi * dlo_hi
        double key;
        // crude boxes carry a structural tail bound for dlo_hi; they get one
        // certified distribution query at the left end before being split
        bool crude = false;
    };
    // ordered by approximate keys; every certified answer below re-checks the
    // exact ubs, so key rounding can never leak out of an enclosure
    auto cmp = [](const Box& x, const Box& y) { return x.key < y.key; };
    std::vector<Box> heap;
    auto push_box = [&](Box b) {
        heap.push_back(std::move(b));
        std::push_heap(heap.begin(), heap.end(), cmp);
    };
    // one box per gap between certified group bounds: for functions spanning
    // many scales this starts the search aligned to where |f| actually lives
    // instead of bisecting down from one box of width sup|f|
    {
        Rational prev(0), prev_tail = supp;
        bool first = true;
        for (auto& [b, tail] : ctx.bound_tails()) {
            if (b > prev) {
                Rational ub = b * prev_tail;
                // d(0+) is exactly the support measure; later tails are crude
                push_box({prev, b, prev_tail, ub, log2_approx(ub), !first});
                prev = b;
                first = false;
            }
            prev_tail = tail;
        }
        if (heap.empty())
            push_box({Rational(0), lam_max, supp, lam_max * supp, log2_approx(lam_max * supp)});
    }

    // exact max of lb, x and the ubs of all pending boxes: a certified global
    // upper bound no matter how the float keys rounded
    auto exact_gub = [&](const Rational& x) {
        Rational g = std::max(x, lb);
        for (const Box& bx : heap)
            if (bx.ub > g) g = bx.ub;
        return g;
    };

    for (long iter = 0; iter < 2000000; ++iter) {
        if (heap.empty()) return {lb, lb};
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Box top = std::move(heap.back());
        heap.pop_back();
        Rational gub = std::max(top.ub, lb);
        if (gub - lb <= rel_tol * gub) {
            gub = exact_gub(top.ub);
            if (gub - lb <= rel_tol * gub) return {lb, gub};
        }
        if (eval_budget <= 0)
            throw inconclusive_error("weak_norm: evaluation budget exhausted", lb.str(),
                                     exact_gub(top.ub).str());

        if (top.crude) {
            // replace the structural tail bound with a certified distribution
            // enclosure at the left end before investing splits in this box
            Rational tol_r = (lb.sign() > 0 ? rel_tol * lb : rel_tol * supp * top.hi) /
                             (Rational(8) * top.hi);
            DistResult dr = dist(top.lo, tol_r, LevelMode::Above);
            Rational cand = top.lo * dr.enc.lo;
            if (cand > lb) lb = cand;
            Rational d_new = std::min(dr.enc.hi, top.dlo_hi);
            Rational ub_new = top.hi * d_new;
            push_box({top.lo, top.hi, d_new, ub_new, log2_approx(ub_new), false});
            continue;
        }

        // split: geometric while the box spans orders of magnitude
        Rational m;
        if (top.lo.is_zero() || top.hi > Rational(4) * top.lo) {
            if (top.lo.is_zero()) {
                m = top.hi / Rational(2);
            } else {
                long k = std::lround((log2_approx(top.lo) + log2_approx(top.hi)) / 2.0);
                m = detail::pow2_rat(k);
                if (m <= top.lo || m >= top.hi) m = (top.lo + top.hi) / Rational(2);
            }
        } else {
            m = (top.lo + top.hi) / Rational(2);
        }

        Rational tol_d = (lb.sign() > 0 ? rel_tol * lb : rel_tol * supp * m) / (Rational(8) * top.hi);
        DistResult dm = dist(m, tol_d, LevelMode::Above);
        Rational cand = m * dm.enc.lo;
        if (cand > lb) lb = cand;

        Rational ub_l = m * top.dlo_hi;
        push_box({top.lo, m, top.dlo_hi, ub_l, log2_approx(ub_l)});
        Rational ub_r = top.hi * dm.enc.hi;
        push_box({m, top.hi, dm.enc.hi, ub_r, log2_approx(ub_r)});
    }
    throw inconclusive_error("weak_norm: iteration cap reached", lb.str(),
                             exact_gub(lb).str());
}

// Certified enclosure of the decreasing rearrangement f*(t) = inf{ s > 0 :
// |{|f| > s}| <= t }, width <= tol, by bisection on the level s with
// certified comparisons of the distribution enclosure against t.
inline RatInterval rearrangement_at(const PiecewiseFn& f, const Rational& t, const Rational& tol,
                                    long eval_budget = 200000000L) {
    if (t.sign() <= 0 || t > Rational(1))
        throw invalid_parameter("rearrangement_at: t outside (0,1]");
    if (tol.sign() <= 0) throw invalid_parameter("rearrangement_at: tol <= 0");
    if (f.is_zero()) return RatInterval(Rational(0));
    MeasureContext ctx(f);
    if (ctx.support_measure() <= t) return RatInterval(Rational(0));

    Rational s_lo(0), s_hi = ctx.sup_abs();
    Rational tol_d = t / Rational(1000);
    while (s_hi - s_lo > tol) {
        Rational mid;
        if (s_lo.is_zero()) {
            mid = s_hi / Rational(2);
        } else if (s_hi > Rational(4) * s_lo) {
            long k = std::lround((log2_approx(s_lo) + log2_approx(s_hi)) / 2.0);
            mid = detail::pow2_rat(k);
            if (mid <= s_lo || mid >= s_hi) mid = (s_lo + s_hi) / Rational(2);
        } else {
            mid = (s_lo + s_hi) / Rational(2);
        }
        for (;;) {
            long slice = std::min<long>(1000000L, std::max<long>(eval_budget, 1L));
            long before = ctx.evals_used();
            DistResult dm = ctx.distribution_best(mid, tol_d, LevelMode::Above, slice);
            eval_budget -= std::max<long>(ctx.evals_used() - before, 1L);
            if (dm.enc.hi <= t) {
                s_hi = mid;
                break;
            }
            if (dm.enc.lo > t) {
                s_lo = mid;
                break;
            }
            tol_d = tol_d / Rational(32);
            if (eval_budget <= 0 || tol_d < t * detail::pow2_rat(-80))
                throw inconclusive_error("rearrangement_at: cannot separate level from t",
                                         s_lo.str(), s_hi.str());
        }
    }
    return {s_lo, s_hi};
}

} // namespace weakl1
