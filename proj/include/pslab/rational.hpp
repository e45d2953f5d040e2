#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <ostream>

#include "pslab/int256.hpp"

namespace pslab {

// Exact rational scalar on 256-bit integers, always stored normalized
// (den > 0, gcd(|num|, den) = 1). Arithmetic throws std::overflow_error
// instead of wrapping; 256 bits cover the exact Kepler coefficients up
// to order 30 (worst reduced numerator 29^27 ~ 2^131) and all tree and
// series identities exercised here.
class Rational {
public:
    using Int = Int256;

    Rational() : num_(0), den_(1) {}
    Rational(long long n) : num_(n), den_(1) {}
    Rational(Int n, Int d) : num_(n), den_(d) { normalize(); }

    static Rational from_string(std::string_view s);

    Int num() const { return num_; }
    Int den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    int sign() const { return num_.sign(); }

    double to_double() const { return num_.to_double() / den_.to_double(); }

    friend Rational operator-(const Rational& a) { return Rational(unchecked{}, -a.num_, a.den_); }

    // gcd cross-reduction before multiplying keeps intermediates near the
    // size of the reduced result.
    friend Rational operator+(const Rational& a, const Rational& b) {
        const Int g = gcd(a.den_, b.den_);
        const Int da = a.den_ / g, db = b.den_ / g;
        return Rational(checked_add(checked_mul(a.num_, db), checked_mul(b.num_, da)),
                        checked_mul(a.den_, db));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        const Int g1 = gcd(a.num_, b.den_);
        const Int g2 = gcd(b.num_, a.den_);
        return Rational(checked_mul(a.num_ / g1, b.num_ / g2),
                        checked_mul(a.den_ / g2, b.den_ / g1));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_.is_zero()) throw std::domain_error("Rational: division by zero");
        const Int g1 = gcd(a.num_, b.num_);
        const Int g2 = gcd(b.den_, a.den_);
        return Rational(checked_mul(a.num_ / g1, b.den_ / g2),
                        checked_mul(a.den_ / g2, b.num_ / g1));
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // "p/q", or just "p" for integers.
    std::string str() const;

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    struct unchecked {};
    Rational(unchecked, Int n, Int d) : num_(n), den_(d) {}

    static Int checked_add(const Int& a, const Int& b) { return a + b; }
    static Int checked_mul(const Int& a, const Int& b) { return a * b; }
    static Int gcd(const Int& a, const Int& b) { return Int256::gcd(a, b); }

    void normalize() {
        if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
        if (den_.negative()) { num_ = -num_; den_ = -den_; }
        if (num_.is_zero()) { den_ = Int(1LL); return; }
        const Int g = gcd(num_, den_);
        num_ = num_ / g;
        den_ = den_ / g;
    }

    Int num_;
    Int den_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline std::string Rational::str() const {
    std::string s = num_.str();
    if (den_ != Int(1LL)) { s += '/'; s += den_.str(); }
    return s;
}

inline Rational Rational::from_string(std::string_view s) {
    auto slash = s.find('/');
    if (slash == std::string_view::npos) return Rational(Int256::from_string(s), Int(1LL));
    return Rational(Int256::from_string(s.substr(0, slash)), Int256::from_string(s.substr(slash + 1)));
}

// Scalar traits shared by the series/trig/tree machinery: coefficient
// "mode" (exact vs float) is the scalar type itself; conversions between
// modes go through explicit casts only.
template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char* mode = "exact";
    static Rational zero() { return Rational(); }
    static Rational one() { return Rational(1); }
    static Rational from_int(long long n) { return Rational(n); }
    static bool is_zero(const Rational& x) { return x.is_zero(); }
    static double to_double(const Rational& x) { return x.to_double(); }
    static std::string str(const Rational& x) { return x.str(); }
};

template <typename F>
struct FloatScalarTraits {
    static constexpr bool exact = false;
    static constexpr const char* mode = "float";
    static F zero() { return F(0); }
    static F one() { return F(1); }
    static F from_int(long long n) { return static_cast<F>(n); }
    static bool is_zero(const F& x) { return x == F(0); }
    static double to_double(const F& x) { return static_cast<double>(x); }
    static std::string str(const F& x) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.17g", static_cast<double>(x));
        return std::string(buf);
    }
};

template <> struct ScalarTraits<double> : FloatScalarTraits<double> {};
template <> struct ScalarTraits<long double> : FloatScalarTraits<long double> {};

} // namespace pslab
