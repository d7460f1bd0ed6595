#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "piecewise.hpp"

namespace weakl1 {

// Measure of {|f| > lambda} vs {|f| >= lambda}. The two differ only on
// constant pieces whose level equals lambda exactly; everywhere else level
// sets of the reciprocal expressions have measure zero boundaries.
enum class LevelMode { Above, AtOrAbove };

struct DistResult {
    RatInterval enc;
    bool certified = false; // width met the requested tolerance
};

namespace detail {

// conservative double bounds around a rational, for cheap pre-filtering
inline double under_d(const Rational& x) {
    double d = x.to_double();
    return d - (std::fabs(d) * 1e-13 + 1e-300);
}
inline double over_d(const Rational& x) {
    double d = x.to_double();
    return d + (std::fabs(d) * 1e-13 + 1e-300);
}

// A segment, rescaled to s in (0,1]: psi(s) = c0 + sum u_j/(s + sigma_j)
// with sigma_j > 0 and max(|u_j|, |c0|) = 1. Many segments of one function
// (and of different functions) share a profile, so the bisection tree built
// here is computed once and queried at many thresholds.
class Profile {
  public:
    Rational c0;
    std::vector<HyperTerm> terms; // (u_j, sigma_j)

    bool exact_recip = false; // single term, zero constant: closed-form level sets
    bool exact_const = false; // no terms: |psi| = 1

    Rational minpos;  // certified min of |psi| outside core leaves
    Rational abs_hi;  // certified sup of |psi|
    Rational core_s;  // total s-measure of unresolved (possibly zero) leaves
    int core_depth = 20;

    Profile(Rational c, std::vector<HyperTerm> ts) : c0(std::move(c)), terms(std::move(ts)) {
        if (terms.empty()) {
            exact_const = true;
            minpos = abs_hi = Rational(1);
            core_s = Rational(0);
            return;
        }
        if (terms.size() == 1 && c0.is_zero()) {
            exact_recip = true;
            const Rational u = terms[0].coeff.abs();
            const Rational& sg = terms[0].shift;
            minpos = u / (Rational(1) + sg);
            abs_hi = u / sg;
            core_s = Rational(0);
            return;
        }
        core_s = Rational(0);
        nodes_.push_back(make_node_(Rational(0), Rational(1)));
        long scratch = 1L << 24;
        classify_(0, Rational(0), Rational(1), 0, scratch);
        abs_hi = nodes_[0].rng.abs().hi;
        if (!minpos_seen_) minpos = Rational(0);
    }

    // exact s-measure of {|psi| > c} for the single-reciprocal case
    Rational exact_measure(const Rational& c) const {
        const Rational u = terms[0].coeff.abs();
        const Rational& sg = terms[0].shift;
        if (c.is_zero()) return Rational(1);
        Rational s_star = u / c - sg;
        if (s_star >= Rational(1)) return Rational(1);
        if (s_star.sign() <= 0) return Rational(0);
        return s_star;
    }

    struct WalkOut {
        Rational in, ambig;   // s-measures
        bool complete = true; // false if budget or depth cap interfered
    };

    // s-measure of {|psi| > c}, ambiguity kept under the dyadic cutoff depth.
    WalkOut walk(const Rational& c, int depth_cap, long& budget) {
        WalkOut out{Rational(0), Rational(0), true};
        double cu = under_d(c), co = over_d(c);
        bool dbl_ok = std::isfinite(cu) && std::isfinite(co) && c.sign() >= 0;
        walk_(0, Rational(0), Rational(1), 0, c, cu, co, dbl_ok, depth_cap, budget, out);
        return out;
    }

    // push unresolved (possibly zero) regions below the given dyadic depth
    void refine_cores(int new_depth, long& budget) {
        if (exact_const || exact_recip || new_depth <= core_depth) return;
        core_depth = new_depth;
        auto old = std::move(cores_);
        cores_.clear();
        core_s = Rational(0);
        for (auto& cl : old) classify_(cl.node, cl.s1, cl.s2, cl.depth, budget);
    }

    long nodes_built() const { return static_cast<long>(nodes_.size()); }

  private:
    struct Node {
        RatInterval rng;
        double alo_d, ahi_d; // conservative bounds on |rng|
        uint32_t left = 0, right = 0;
    };
    struct CoreLeaf {
        uint32_t node;
        Rational s1, s2;
        int depth;
    };

    RatInterval range_(const Rational& s1, const Rational& s2) const {
        RatInterval acc((Rational(c0)));
        for (const auto& t : terms) {
            Rational v1 = t.coeff / (s1 + t.shift);
            Rational v2 = t.coeff / (s2 + t.shift);
            if (v1 <= v2) acc = acc + RatInterval(v1, v2);
            else acc = acc + RatInterval(v2, v1);
        }
        return acc;
    }

    Node make_node_(const Rational& s1, const Rational& s2) const {
        Node n;
        n.rng = range_(s1, s2);
        RatInterval a = n.rng.abs();
        n.alo_d = under_d(a.lo);
        n.ahi_d = over_d(a.hi);
        return n;
    }

    void ensure_children_(uint32_t idx, const Rational& s1, const Rational& s2, long& budget) {
        if (nodes_[idx].left != 0) return;
        Rational mid = (s1 + s2) / Rational(2);
        budget -= 2;
        Node l = make_node_(s1, mid), r = make_node_(mid, s2);
        uint32_t li = static_cast<uint32_t>(nodes_.size());
        nodes_.push_back(std::move(l));
        nodes_.push_back(std::move(r));
        nodes_[idx].left = li;
        nodes_[idx].right = li + 1;
    }

    // initial sign classification: find leaves certainly away from zero
    void classify_(uint32_t idx, const Rational& s1, const Rational& s2, int depth, long& budget) {
        RatInterval a = nodes_[idx].rng.abs();
        if (a.lo.sign() > 0) {
            if (!minpos_seen_ || a.lo < minpos) { minpos = a.lo; minpos_seen_ = true; }
            return;
        }
        if (depth >= core_depth || budget <= 0) {
            cores_.push_back({idx, s1, s2, depth});
            core_s += s2 - s1;
            return;
        }
        ensure_children_(idx, s1, s2, budget);
        Rational mid = (s1 + s2) / Rational(2);
        classify_(nodes_[idx].left, s1, mid, depth + 1, budget);
        classify_(nodes_[idx].right, mid, s2, depth + 1, budget);
    }

    void walk_(uint32_t idx, const Rational& s1, const Rational& s2, int depth, const Rational& c,
               double cu, double co, bool dbl_ok, int depth_cap, long& budget, WalkOut& out) {
        const Node& nd = nodes_[idx];
        if (dbl_ok) {
            if (nd.alo_d > co) { out.in += s2 - s1; return; }
            if (nd.ahi_d <= cu) return;
        } else {
            RatInterval a = nd.rng.abs();
            if (a.lo > c) { out.in += s2 - s1; return; }
            if (a.hi <= c) return;
        }
        if (depth >= depth_cap) {
            out.ambig += s2 - s1;
            if (depth >= hard_depth_cap_) out.complete = false;
            return;
        }
        if (budget <= 0) {
            out.ambig += s2 - s1;
            out.complete = false;
            return;
        }
        ensure_children_(idx, s1, s2, budget);
        Rational mid = (s1 + s2) / Rational(2);
        walk_(nodes_[idx].left, s1, mid, depth + 1, c, cu, co, dbl_ok, depth_cap, budget, out);
        walk_(nodes_[idx].right, mid, s2, depth + 1, c, cu, co, dbl_ok, depth_cap, budget, out);
    }

    static constexpr int hard_depth_cap_ = 60;
    std::deque<Node> nodes_;
    std::vector<CoreLeaf> cores_;
    bool minpos_seen_ = false;
};

} // namespace detail

// Shared evaluation state for all level-set queries against one function.
// Segments are grouped by (scale, profile); each group answers threshold
// queries either in closed form or through its profile's cached tree.
class MeasureContext {
  public:
    explicit MeasureContext(const PiecewiseFn& f) {
        std::map<std::string, size_t> profile_by_sig;
        std::map<std::string, size_t> group_by_key;
        for (const auto& seg : f.segments()) {
            Rational L = seg.length();
            // rescale t = a + L*s, then pull out the largest magnitude
            Rational c0_raw = seg.constant;
            std::vector<HyperTerm> ts;
            Rational gmax = c0_raw.abs();
            for (const auto& t : seg.terms) {
                Rational u = t.coeff / L;
                Rational sg = (seg.a + t.shift) / L;
                if (u.abs() > gmax) gmax = u.abs();
                ts.push_back({u, sg});
            }
            Rational G = gmax; // > 0: zero segments were dropped in normalization
            Rational c0n = c0_raw / G;
            std::string sig = c0n.str();
            for (auto& t : ts) {
                t.coeff /= G;
                sig += "|" + t.coeff.str() + "," + t.shift.str();
            }
            size_t pidx;
            auto pit = profile_by_sig.find(sig);
            if (pit == profile_by_sig.end()) {
                pidx = profiles_.size();
                profiles_.push_back(std::make_unique<detail::Profile>(c0n, ts));
                profile_by_sig.emplace(sig, pidx);
            } else {
                pidx = pit->second;
            }
            std::string gkey = G.str() + "#" + sig;
            auto git = group_by_key.find(gkey);
            if (git == group_by_key.end()) {
                group_by_key.emplace(gkey, groups_.size());
                groups_.push_back(Group{G, pidx, L, Rational(0), Rational(0), Rational(0), 0, 0});
            } else {
                groups_[git->second].len += L;
            }
        }
        for (auto& g : groups_) {
            supp_ += g.len;
            const auto& p = *profiles_[g.profile];
            if (p.exact_const) {
                auto [it, fresh] = const_levels_.try_emplace(g.G, g.len);
                if (!fresh) it->second += g.len;
            }
            if (!(p.exact_const || p.exact_recip)) all_exact_ = false;
        }
        rebuild_arrays_();
    }

    const Rational& support_measure() const { return supp_; }
    Rational sup_abs() const { return groups_.empty() ? Rational(0) : max_H_; }
    bool all_exact() const { return all_exact_; }
    long evals_used() const { return evals_used_; }

    // Enclosure of |{ |f| > lambda }| (or >=), aiming for width <= tol.
    // Never throws on budget exhaustion; check .certified.
    DistResult distribution_best(const Rational& lambda, const Rational& tol, LevelMode mode,
                                 long budget = 1000000) {
        if (lambda.sign() < 0) throw invalid_parameter("distribution: lambda < 0");
        if (tol.sign() <= 0) throw invalid_parameter("distribution: tol <= 0");
        if (lambda.is_zero()) {
            Rational v = (mode == LevelMode::Above) ? supp_ : Rational(1);
            return {RatInterval(v), true};
        }
        long start_budget = budget;
        DistResult best{RatInterval(Rational(0), supp_), false};
        for (int round = 0; round < 44; ++round) {
            size_t idx = full_boundary_(lambda);
            Rational lo = suffix_len_[idx] - suffix_core_[idx];
            Rational hi = suffix_len_[idx];
            if (mode == LevelMode::AtOrAbove) {
                auto it = const_levels_.find(lambda);
                if (it != const_levels_.end()) {
                    lo += it->second;
                    hi += it->second;
                }
            }
            Rational frozen = hi - lo;
            // actives: F <= lambda < H
            double lam_key = log2_approx(lambda);
            std::vector<size_t> actives;
            for (size_t i = 0; i < idx; ++i) {
                const Group& g = groups_[order_[i]];
                if (g.H_key > lam_key - key_margin_ && g.H > lambda) actives.push_back(order_[i]);
            }
            bool complete = true;
            if (!actives.empty()) {
                Rational allowance = tol - frozen;
                if (allowance.sign() <= 0 || frozen > tol / Rational(2)) {
                    if (escalate_cores_(lambda, budget)) continue;
                }
                allowance = std::max(tol - frozen, tol / Rational(4)) / Rational(static_cast<long>(actives.size()));
                for (size_t gi : actives) {
                    Group& g = groups_[gi];
                    auto& prof = *profiles_[g.profile];
                    Rational c = lambda / g.G;
                    if (prof.exact_const) continue; // F == H, never active
                    if (prof.exact_recip) {
                        Rational m = prof.exact_measure(c) * g.len;
                        lo += m;
                        hi += m;
                        continue;
                    }
                    Rational allow_s = allowance / g.len;
                    int depth = depth_for_(allow_s, prof.terms.size());
                    auto w = prof.walk(c, depth, budget);
                    lo += g.len * w.in;
                    hi += g.len * (w.in + w.ambig);
                    if (!w.complete) complete = false;
                }
            }
            RatInterval enc(lo, hi);
            bool certified = complete && enc.width() <= tol;
            if (enc.width() < best.enc.width() || certified) best = {enc, certified};
            if (certified) break;
            if (budget <= 0) break;
            if (frozen > tol / Rational(2)) {
                if (!escalate_cores_(lambda, budget)) break;
                continue;
            }
            break; // walk allowances are guaranteed-sufficient; no retry helps
        }
        evals_used_ += start_budget - budget;
        return best;
    }

    // Largest certain lower bound of sup_lambda lambda * d(lambda) available
    // from the grouped structure alone: at lambda just below a group's floor
    // F, every group with floor >= F still counts fully (минус cores).
    Rational quick_norm_lower_bound() const {
        Rational best(0);
        for (size_t i = 0; i < order_.size(); ++i) {
            const Group& g = groups_[order_[i]];
            if (g.F.sign() <= 0) continue;
            Rational v = g.F * (suffix_len_[i] - suffix_core_[i]);
            if (v > best) best = v;
        }
        return best;
    }

    // Distinct levels where d jumps by a positive measure (constant pieces).
    std::vector<Rational> jump_levels() const {
        std::vector<Rational> out;
        for (const auto& [level, len] : const_levels_) out.push_back(level);
        return out;
    }

    // Floors of the groups, useful as probe seeds near local maxima.
    std::vector<Rational> group_floors() const {
        std::vector<Rational> out;
        for (size_t i = 0; i < order_.size(); ++i) out.push_back(groups_[order_[i]].F);
        return out;
    }

    // Sorted distinct certified bounds of |f| (all group floors and ceilings),
    // each paired with an exact upper bound of the distribution just above it:
    // d(b+) <= total length of groups whose ceiling exceeds b. Lets callers
    // seed a sup search with scale-aligned boxes instead of one global box.
    std::vector<std::pair<Rational, Rational>> bound_tails() const {
        std::vector<Rational> bounds;
        bounds.reserve(groups_.size() * 2);
        for (const auto& g : groups_) {
            bounds.push_back(g.F);
            bounds.push_back(g.H);
        }
        std::sort(bounds.begin(), bounds.end());
        bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
        std::vector<size_t> by_h(groups_.size());
        for (size_t i = 0; i < by_h.size(); ++i) by_h[i] = i;
        std::sort(by_h.begin(), by_h.end(),
                  [&](size_t x, size_t y) { return groups_[x].H < groups_[y].H; });
        std::vector<std::pair<Rational, Rational>> out;
        out.reserve(bounds.size());
        Rational below(0);
        size_t hp = 0;
        for (const Rational& b : bounds) {
            while (hp < by_h.size() && groups_[by_h[hp]].H <= b) below += groups_[by_h[hp++]].len;
            out.emplace_back(b, supp_ - below);
        }
        return out;
    }

  private:
    struct Group {
        Rational G;
        size_t profile;
        Rational len;            // total t-measure carried by this group
        Rational core_len;       // len * profile core_s
        Rational F, H;           // certified floor / ceiling of |f| on the group
        double F_key, H_key;     // log2 keys for fast filtering
    };

    static int depth_for_(const Rational& allow_s, size_t nterms) {
        if (allow_s.sign() <= 0) return 60;
        double a = log2_approx(allow_s) - std::log2(8.0 * static_cast<double>(nterms) + 4.0);
        if (a >= -1.0) return 4;
        int d = static_cast<int>(std::ceil(-a));
        return std::min(std::max(d, 4), 60);
    }

    void rebuild_arrays_() {
        for (auto& g : groups_) {
            const auto& p = *profiles_[g.profile];
            g.F = g.G * p.minpos;
            g.H = g.G * p.abs_hi;
            g.core_len = g.len * p.core_s;
            g.F_key = log2_approx(g.F);
            g.H_key = log2_approx(g.H);
        }
        order_.resize(groups_.size());
        for (size_t i = 0; i < order_.size(); ++i) order_[i] = i;
        std::sort(order_.begin(), order_.end(),
                  [&](size_t x, size_t y) { return groups_[x].F < groups_[y].F; });
        suffix_len_.assign(order_.size() + 1, Rational(0));
        suffix_core_.assign(order_.size() + 1, Rational(0));
        f_keys_.resize(order_.size());
        max_H_ = Rational(0);
        for (size_t i = order_.size(); i-- > 0;) {
            const Group& g = groups_[order_[i]];
            suffix_len_[i] = suffix_len_[i + 1] + g.len;
            suffix_core_[i] = suffix_core_[i + 1] + g.core_len;
            f_keys_[i] = g.F_key;
            if (g.H > max_H_) max_H_ = g.H;
        }
    }

    // first position in F-sorted order with F > lambda
    size_t full_boundary_(const Rational& lambda) const {
        double lk = log2_approx(lambda);
        size_t lo = 0, hi = order_.size();
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (f_keys_[mid] < lk - key_margin_) lo = mid + 1;
            else hi = mid;
        }
        // exact pinning around the approximate split
        while (lo > 0 && groups_[order_[lo - 1]].F > lambda) --lo;
        while (lo < order_.size() && groups_[order_[lo]].F <= lambda) ++lo;
        return lo;
    }

    // deepen unresolved cores of groups currently counted as fully-in
    bool escalate_cores_(const Rational& lambda, long& budget) {
        bool any = false;
        size_t idx = full_boundary_(lambda);
        for (size_t i = idx; i < order_.size(); ++i) {
            Group& g = groups_[order_[i]];
            if (g.core_len.sign() > 0) {
                auto& p = *profiles_[g.profile];
                p.refine_cores(p.core_depth + 4, budget);
                any = true;
            }
        }
        if (any) rebuild_arrays_();
        return any && budget > 0;
    }

    std::vector<std::unique_ptr<detail::Profile>> profiles_;
    std::vector<Group> groups_;
    std::vector<size_t> order_; // group indices sorted by F
    std::vector<Rational> suffix_len_, suffix_core_;
    std::vector<double> f_keys_;
    std::map<Rational, Rational> const_levels_;
    Rational supp_ = Rational(0);
    Rational max_H_ = Rational(0);
    bool all_exact_ = true;
    long evals_used_ = 0;
    static constexpr double key_margin_ = 1e-6;
};

// Certified enclosure of the distribution function |{ |f| > lambda }|.
// Throws inconclusive_error when the refinement budget runs out first.
inline RatInterval distribution(const PiecewiseFn& f, const Rational& lambda, const Rational& tol,
                                long budget = 1000000) {
    MeasureContext ctx(f);
    DistResult r = ctx.distribution_best(lambda, tol, LevelMode::Above, budget);
    if (!r.certified)
        throw inconclusive_error("distribution: refinement budget exhausted", r.enc.lo.str(),
                                 r.enc.hi.str());
    return r.enc;
}

} // namespace weakl1
