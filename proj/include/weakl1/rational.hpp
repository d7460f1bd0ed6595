#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <utility>

#include "errors.hpp"

namespace weakl1 {

// Exact rational number, always held in canonical form (gcd(num,den) = 1,
// den > 0). Thin wrapper over GMP's mpq_class; the wrapper exists because
// mpq_class does NOT canonicalize values built from raw parts, and the rest
// of the library relies on canonical equality.
class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(const mpz_class& n) : v_(n) {}
    Rational(long num, long den) : v_(num, den) { canon_(); }
    Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) { canon_(); }
    explicit Rational(mpq_class q) : v_(std::move(q)) { canon_(); }

    // Parses "p/q" or a bare integer "p". Whitespace is not accepted.
    static Rational parse(const std::string& s) {
        if (s.empty()) throw parse_error("empty rational literal");
        auto slash = s.find('/');
        try {
            if (slash == std::string::npos) {
                return Rational(mpz_class(s));
            }
            mpz_class num(s.substr(0, slash));
            mpz_class den(s.substr(slash + 1));
            if (den == 0) throw parse_error("zero denominator in '" + s + "'");
            return Rational(num, den);
        } catch (const std::invalid_argument&) {
            throw parse_error("bad rational literal '" + s + "'");
        }
    }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    Rational abs() const { return Rational(unchecked_tag{}, ::abs(v_)); }

    Rational reciprocal() const {
        if (is_zero()) throw invalid_parameter("reciprocal of zero");
        mpq_class r(v_.get_den(), v_.get_num());
        if (sgn(r.get_den()) < 0) { r.get_num() = -r.get_num(); r.get_den() = -r.get_den(); }
        return Rational(unchecked_tag{}, r);
    }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(unchecked_tag{}, a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(unchecked_tag{}, a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(unchecked_tag{}, a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw invalid_parameter("division by zero rational");
        return Rational(unchecked_tag{}, a.v_ / b.v_);
    }
    Rational operator-() const { return Rational(unchecked_tag{}, -v_); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw invalid_parameter("division by zero rational");
        v_ /= o.v_;
        return *this;
    }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) != 0; }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) >= 0; }

    // Canonical "p/q" string; integers render as "p/1" so the form is uniform.
    std::string str() const {
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    // Round-to-nearest decimal rendering with the given number of significant
    // digits, e.g. 4861/280 -> "17.3607142857". Presentation only.
    std::string decimal(int sig_digits = 12) const {
        if (is_zero()) return "0";
        std::string sign_str = sign() < 0 ? "-" : "";
        mpz_class p = ::abs(v_.get_num()), q = v_.get_den();
        // decimal exponent: find e with 10^(e-1) <= p/q < 10^e
        long e = 0;
        if (p >= q) {
            mpz_class t = q;
            while (t <= p) { t *= 10; ++e; } // 10^(e-1)*q <= p < 10^e*q
        } else {
            mpz_class t = p;
            while (t < q) { t *= 10; --e; }
            ++e;
        }
        // scaled = round(p/q * 10^(sig - e)) has exactly sig digits
        long shift = sig_digits - e;
        mpz_class num = p, den = q;
        if (shift >= 0) {
            mpz_class ten10;
            mpz_ui_pow_ui(ten10.get_mpz_t(), 10, static_cast<unsigned long>(shift));
            num *= ten10;
        } else {
            mpz_class ten10;
            mpz_ui_pow_ui(ten10.get_mpz_t(), 10, static_cast<unsigned long>(-shift));
            den *= ten10;
        }
        mpz_class digits = (2 * num + den) / (2 * den); // round half up
        std::string ds = digits.get_str();
        if (static_cast<long>(ds.size()) > sig_digits) { ++e; ds.pop_back(); } // rounding carried, e.g. 999->100
        // place decimal point: value = 0.ds * 10^e
        std::string out;
        if (e <= 0) {
            out = "0." + std::string(static_cast<size_t>(-e), '0') + ds;
        } else if (static_cast<size_t>(e) >= ds.size()) {
            out = ds + std::string(static_cast<size_t>(e) - ds.size(), '0');
        } else {
            out = ds.substr(0, static_cast<size_t>(e)) + "." + ds.substr(static_cast<size_t>(e));
        }
        // trim trailing zeros after a decimal point
        if (out.find('.') != std::string::npos) {
            while (out.back() == '0') out.pop_back();
            if (out.back() == '.') out.pop_back();
        }
        return sign_str + out;
    }

    // Nearest double (GMP rounds); saturates to +-inf outside double range.
    double to_double() const { return v_.get_d(); }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  private:
    struct unchecked_tag {};
    // arithmetic on canonical operands stays canonical; skip the recheck
    Rational(unchecked_tag, mpq_class q) : v_(std::move(q)) {}

    void canon_() {
        if (sgn(v_.get_den()) == 0) throw invalid_parameter("zero denominator");
        v_.canonicalize();
    }

    mpq_class v_;
};

// b^e for integer e (e < 0 allowed when b != 0).
inline Rational pow_int(const Rational& b, long e) {
    if (e == 0) return Rational(1);
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    mpz_class pn, pd;
    mpz_pow_ui(pn.get_mpz_t(), b.num().get_mpz_t(), k);
    mpz_pow_ui(pd.get_mpz_t(), b.den().get_mpz_t(), k);
    Rational r(pn, pd);
    return inv ? r.reciprocal() : r;
}

// Approximate log2(|r|) as a double, accurate to ~1e-9 relative; usable far
// outside double range (e.g. 10^-512). Intended for fast ordering keys; all
// certified decisions use exact comparisons.
inline double log2_approx(const Rational& r) {
    if (r.is_zero()) return -std::numeric_limits<double>::infinity();
    auto log2_mpz = [](const mpz_class& z) {
        long exp2 = 0;
        double d = mpz_get_d_2exp(&exp2, z.get_mpz_t());
        return std::log2(std::fabs(d)) + static_cast<double>(exp2);
    };
    return log2_mpz(r.num()) - log2_mpz(r.den());
}

} // namespace weakl1
