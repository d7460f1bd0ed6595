#pragma once

#include "interval.hpp"

namespace weakl1 {

namespace detail {

// Enclosure of 2*atanh(y) = ln((1+y)/(1-y)) for |y| <= 1/3, via the odd
// series 2*sum y^(2k+1)/(2k+1), summed exactly in rationals. The remainder
// after the y^(2K+1) term is bounded by 2|y|^(2K+3) / ((2K+3)(1-y^2)) and has
// the sign of y, so the enclosure is one-sided.
inline RatInterval atanh2_enclosure(const Rational& y, const Rational& eps) {
    if (y.abs() > Rational(1, 3)) throw invalid_parameter("atanh2_enclosure: |y| > 1/3");
    if (eps.sign() <= 0) throw invalid_parameter("atanh2_enclosure: eps <= 0");
    if (y.is_zero()) return RatInterval(Rational(0));
    const Rational y2 = y * y;
    const Rational one_minus_y2 = Rational(1) - y2;
    Rational term = y; // y^(2k+1)
    Rational sum = y;  // sum of term/(2k+1) so far, k = 0
    long k = 0;
    for (;;) {
        Rational tail = Rational(2) * term.abs() * y2 / (Rational(2 * k + 3) * one_minus_y2);
        if (tail <= eps) {
            Rational s2 = Rational(2) * sum;
            if (y.sign() > 0) return {s2, s2 + tail};
            return {s2 - tail, s2};
        }
        ++k;
        term *= y2;
        sum += term / Rational(2 * k + 1);
        if (k > 4096) throw inconclusive_error("atanh series failed to converge", sum.str(), sum.str());
    }
}

// Cached enclosure of ln 2 = 2*atanh(1/3), refined on demand.
inline RatInterval ln2_enclosure(const Rational& eps) {
    thread_local RatInterval cached = atanh2_enclosure(Rational(1, 3), Rational(1, 1000000));
    if (cached.width() > eps) cached = atanh2_enclosure(Rational(1, 3), eps);
    return cached;
}

} // namespace detail

// Certified enclosure of ln(x) for rational x > 0, width <= eps.
//
// Reduction: x = m * 2^e with m in (1/2, 2), where e is the difference of the
// bit lengths of numerator and denominator; then ln x = 2*atanh((m-1)/(m+1))
// + e*ln 2, with the series budget split between the two parts.
inline RatInterval ln_enclosure(const Rational& x, const Rational& eps) {
    if (x.sign() <= 0) throw invalid_parameter("ln_enclosure: x <= 0");
    if (eps.sign() <= 0) throw invalid_parameter("ln_enclosure: eps <= 0");
    long e = static_cast<long>(mpz_sizeinbase(x.num().get_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(x.den().get_mpz_t(), 2));
    Rational m = x * pow_int(Rational(2), -e);
    Rational y = (m - Rational(1)) / (m + Rational(1));
    if (e == 0) return detail::atanh2_enclosure(y, eps);
    Rational half = eps / Rational(2);
    RatInterval series = detail::atanh2_enclosure(y, half);
    RatInterval ln2 = detail::ln2_enclosure(half / Rational(e < 0 ? -e : e));
    return series + Rational(e) * ln2;
}

} // namespace weakl1
