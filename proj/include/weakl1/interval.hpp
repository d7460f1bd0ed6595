#pragma once

#include <algorithm>
#include <ostream>

#include "rational.hpp"

namespace weakl1 {

// Closed interval [lo, hi] with exact rational endpoints. Semantics are
// enclosure: a value reported as RatInterval is guaranteed to lie inside.
struct RatInterval {
    Rational lo, hi;

    RatInterval() : lo(0), hi(0) {}
    RatInterval(Rational point) : lo(point), hi(std::move(point)) {}
    RatInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo > hi) throw invalid_parameter("interval with lo > hi");
    }

    Rational width() const { return hi - lo; }
    bool is_point() const { return lo == hi; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains(const RatInterval& o) const { return lo <= o.lo && o.hi <= hi; }

    // Midpoint, for reporting and split heuristics only.
    Rational mid() const { return (lo + hi) / Rational(2); }

    friend RatInterval operator+(const RatInterval& a, const RatInterval& b) {
        return {a.lo + b.lo, a.hi + b.hi};
    }
    friend RatInterval operator-(const RatInterval& a, const RatInterval& b) {
        return {a.lo - b.hi, a.hi - b.lo};
    }
    friend RatInterval operator*(const RatInterval& a, const RatInterval& b) {
        Rational p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
        return {std::min(std::min(p1, p2), std::min(p3, p4)),
                std::max(std::max(p1, p2), std::max(p3, p4))};
    }
    friend RatInterval operator*(const Rational& c, const RatInterval& a) {
        if (c.sign() >= 0) return {c * a.lo, c * a.hi};
        return {c * a.hi, c * a.lo};
    }
    RatInterval operator-() const { return {-hi, -lo}; }

    // 1/[lo,hi]; requires the interval to not contain 0.
    RatInterval reciprocal() const {
        if (lo.sign() <= 0 && hi.sign() >= 0)
            throw invalid_parameter("reciprocal of interval containing zero");
        return {hi.reciprocal(), lo.reciprocal()};
    }

    RatInterval abs() const {
        if (lo.sign() >= 0) return *this;
        if (hi.sign() <= 0) return -*this;
        return {Rational(0), std::max(-lo, hi)};
    }

    // Smallest interval containing both.
    static RatInterval hull(const RatInterval& a, const RatInterval& b) {
        return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
    }

    friend bool operator==(const RatInterval& a, const RatInterval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator!=(const RatInterval& a, const RatInterval& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const RatInterval& iv) {
        return os << "[" << iv.lo << ", " << iv.hi << "]";
    }
};

enum class Cmp { Less, Greater, Overlapping };

// Certified order of two enclosures: Less/Greater only when every point of a
// is below/above every point of b. Overlapping means "cannot decide"; callers
// must treat it as such, never as equality.
inline Cmp cmp_certified(const RatInterval& a, const RatInterval& b) {
    if (a.hi < b.lo) return Cmp::Less;
    if (a.lo > b.hi) return Cmp::Greater;
    return Cmp::Overlapping;
}

inline Cmp cmp_certified(const RatInterval& a, const Rational& b) {
    return cmp_certified(a, RatInterval(b));
}

} // namespace weakl1
