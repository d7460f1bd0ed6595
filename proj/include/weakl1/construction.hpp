#pragma once

#include <cmath>
#include <vector>

#include "log_enclosure.hpp"
#include "piecewise.hpp"

namespace weakl1 {

// Grid parameters: base n >= 3, family size N = n-1, scale count M = 2^(n-1).
// The innermost breakpoint is n^-M, so the bit budget caps how large the
// exact denominators may grow.
struct ConstructionParams {
    long n = 0, N = 0, M = 0;
    long bit_budget = 1 << 20;

    static ConstructionParams make(long n, long bit_budget = 1 << 20) {
        if (n < 3) throw invalid_parameter("construction: n must be >= 3");
        if (n > 62) throw size_budget_error("construction: 2^(n-1) scales overflow any budget");
        long M = 1L << (n - 1);
        double bits = static_cast<double>(M) * std::log2(static_cast<double>(n));
        if (bits > static_cast<double>(bit_budget))
            throw size_budget_error("construction: n^(2^(n-1)) exceeds the bit budget");
        return ConstructionParams{n, n - 1, M, bit_budget};
    }

    void check_scale(long k) const {
        if (k < 1) throw invalid_parameter("construction: scale index k must be >= 1");
        double bits = static_cast<double>(k) * std::log2(static_cast<double>(n));
        if (bits > static_cast<double>(bit_budget))
            throw size_budget_error("construction: n^k exceeds the bit budget");
    }
};

using SignVector = std::vector<int>; // entries +1 / -1, length N

struct SignMatrix {
    long n = 0;
    long m0 = 1; // index of the all-plus row (1-based)
    std::vector<SignVector> rows; // M = 2^(n-1) rows of length n-1
};

// All 2^len sign rows of a given length in binary-counter order: row m
// (1-based) has entry j equal to +1 exactly when bit j-1 of m-1 is zero,
// so row 1 is all plus.
inline std::vector<SignVector> make_sign_rows(long len) {
    if (len < 1 || len > 30) throw invalid_parameter("make_sign_rows: length out of range");
    std::vector<SignVector> rows;
    rows.reserve(static_cast<size_t>(1L << len));
    for (long m = 0; m < (1L << len); ++m) {
        SignVector row(static_cast<size_t>(len));
        for (long j = 0; j < len; ++j) row[static_cast<size_t>(j)] = ((m >> j) & 1) ? -1 : 1;
        rows.push_back(std::move(row));
    }
    return rows;
}

inline SignMatrix make_sign_matrix(const ConstructionParams& p) {
    SignMatrix E;
    E.n = p.n;
    E.m0 = 1;
    E.rows = make_sign_rows(p.N);
    return E;
}

inline void check_sign_vector(const ConstructionParams& p, const SignVector& v) {
    if (static_cast<long>(v.size()) != p.N)
        throw invalid_parameter("sign vector length must equal n-1");
    for (int s : v)
        if (s != 1 && s != -1) throw invalid_parameter("sign vector entries must be +-1");
}

// Member i of the k-th scaled family (i = 1..n-1): two reciprocal pieces on
// (1/n^k, i/n^k] and (i/n^k, 1/n^(k-1)]; the first piece is empty for i = 1.
inline PiecewiseFn make_f_ki(const ConstructionParams& p, long k, long i) {
    p.check_scale(k);
    if (i < 1 || i > p.N) throw invalid_parameter("make_f_ki: i must be in 1..n-1");
    Rational nk = pow_int(Rational(p.n), k);
    Rational nk1 = pow_int(Rational(p.n), k - 1);
    Rational inv_nk = nk.reciprocal(), inv_nk1 = nk1.reciprocal();
    std::vector<Segment> segs;
    if (i > 1) {
        // 1/(t + 1/n^(k-1) - i/n^k) on (1/n^k, i/n^k]
        segs.push_back(Segment{inv_nk, Rational(i) * inv_nk, Rational(0),
                               {{Rational(1), inv_nk1 - Rational(i) * inv_nk}}});
    }
    // 1/(t - (i-1)/n^k) on (i/n^k, 1/n^(k-1)]
    segs.push_back(Segment{Rational(i) * inv_nk, inv_nk1, Rational(0),
                           {{Rational(1), -(Rational(i - 1) * inv_nk)}}});
    return PiecewiseFn(std::move(segs));
}

// Sum of the whole k-th family, built by folding pointwise additions.
inline PiecewiseFn make_F_k(const ConstructionParams& p, long k) {
    PiecewiseFn acc;
    for (long i = 1; i <= p.N; ++i) acc = add(acc, make_f_ki(p, k, i));
    return acc;
}

namespace detail {

// On block (i/n^k, (i+1)/n^k], member j of the k-th family takes the value
// 1/(t - (j-1)/n^k) when j <= i and 1/(t + (n-j)/n^k) when j > i. Writing
// shifts as (q - i)/n^k for q = 1..n-1 maps member index j to q by a
// reflection: q <= i comes from j = i-q+1, q > i from j = n+i-q. This builds
// sum_j coeffs[j] * f_kj blockwise in one pass.
inline PiecewiseFn signed_family_sum(const ConstructionParams& p, long k,
                                     const std::vector<Rational>& coeffs) {
    p.check_scale(k);
    if (static_cast<long>(coeffs.size()) != p.N)
        throw invalid_parameter("signed_family_sum: need n-1 coefficients");
    Rational nk = pow_int(Rational(p.n), k);
    Rational inv_nk = nk.reciprocal();
    std::vector<Segment> segs;
    for (long i = 1; i <= p.N; ++i) {
        Segment s{Rational(i) * inv_nk, Rational(i + 1) * inv_nk, Rational(0), {}};
        for (long q = 1; q <= p.N; ++q) {
            long j = (q <= i) ? (i - q + 1) : (p.n + i - q);
            s.terms.push_back({coeffs[static_cast<size_t>(j - 1)], Rational(q - i) * inv_nk});
        }
        segs.push_back(std::move(s));
    }
    return PiecewiseFn(std::move(segs));
}

} // namespace detail

// The same sum in closed blockwise form: on each block (i/n^k, (i+1)/n^k]
// the value is sum_q 1/(t + (q-i)/n^k).
inline PiecewiseFn make_F_k_closed(const ConstructionParams& p, long k) {
    return detail::signed_family_sum(p, k, std::vector<Rational>(static_cast<size_t>(p.N), Rational(1)));
}

// Signed family sum at scale m with the m-th row of the sign matrix.
inline PiecewiseFn make_G_m(const ConstructionParams& p, long m, const SignMatrix& E) {
    if (m < 1 || m > p.M) throw invalid_parameter("make_G_m: m must be in 1..2^(n-1)");
    std::vector<Rational> coeffs;
    for (int s : E.rows[static_cast<size_t>(m - 1)]) coeffs.push_back(Rational(s));
    return detail::signed_family_sum(p, m, coeffs);
}

namespace detail {

inline PiecewiseFn make_g_with(const ConstructionParams& p, const SignMatrix& E, long j) {
    if (j < 1 || j > p.N) throw invalid_parameter("make_g: j must be in 1..n-1");
    std::vector<Segment> segs;
    for (long m = 1; m <= p.M; ++m) {
        int sgn = E.rows[static_cast<size_t>(m - 1)][static_cast<size_t>(j - 1)];
        PiecewiseFn f = make_f_ki(p, m, j);
        for (Segment s : f.segments()) {
            for (auto& t : s.terms) t.coeff *= Rational(sgn);
            segs.push_back(std::move(s));
        }
    }
    return PiecewiseFn(std::move(segs));
}

} // namespace detail

// The j-th member of the diagonal family: sum over scales m of
// eps^m_j * f_mj with the canonical sign rows. Supports are nested disjoint
// rings, so segments are emitted directly without pointwise addition.
inline PiecewiseFn make_g(const ConstructionParams& p, long j) {
    return detail::make_g_with(p, make_sign_matrix(p), j);
}

// sum_j eta_j g_j assembled scale by scale: at scale m the effective row is
// the entrywise product eta o eps^m.
inline PiecewiseFn combine_signs(const ConstructionParams& p, const SignVector& eta,
                                 const SignMatrix& E) {
    check_sign_vector(p, eta);
    PiecewiseFn acc;
    std::vector<PiecewiseFn> per_scale;
    per_scale.reserve(static_cast<size_t>(p.M));
    for (long m = 1; m <= p.M; ++m) {
        std::vector<Rational> coeffs;
        coeffs.reserve(static_cast<size_t>(p.N));
        for (long j = 0; j < p.N; ++j)
            coeffs.push_back(Rational(eta[static_cast<size_t>(j)] *
                                      E.rows[static_cast<size_t>(m - 1)][static_cast<size_t>(j)]));
        per_scale.push_back(detail::signed_family_sum(p, m, coeffs));
    }
    // scales live on disjoint rings: concatenate segments directly
    std::vector<Segment> segs;
    for (auto& f : per_scale)
        for (const Segment& s : f.segments()) segs.push_back(s);
    return PiecewiseFn(std::move(segs));
}

// Step majorant sum_m n^m * lnn_hi on (n^-m, n^-(m-1)]. lnn_hi must be a
// certified upper bound of ln n; this is checked against a refined enclosure.
inline StepFn make_step_majorant(const ConstructionParams& p, const Rational& lnn_hi) {
    Rational eps(1, 1000000);
    for (int tries = 0; tries < 12; ++tries) {
        RatInterval enc = ln_enclosure(Rational(p.n), eps);
        if (lnn_hi >= enc.hi) break;
        if (lnn_hi < enc.lo)
            throw invalid_parameter("make_step_majorant: lnn_hi is below ln n");
        eps = eps / Rational(1000);
        if (tries == 11)
            throw invalid_parameter("make_step_majorant: cannot certify lnn_hi >= ln n");
    }
    std::vector<Segment> segs;
    for (long m = 1; m <= p.M; ++m) {
        Rational lo = pow_int(Rational(p.n), -m);
        Rational hi = pow_int(Rational(p.n), -(m - 1));
        segs.push_back(Segment{lo, hi, pow_int(Rational(p.n), m) * lnn_hi, {}});
    }
    return StepFn(PiecewiseFn(std::move(segs)));
}

} // namespace weakl1
