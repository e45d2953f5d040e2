#pragma once

#include <vector>
#include <algorithm>
#include <stdexcept>
#include <cmath>

#include "pslab/rational.hpp"

namespace pslab {

// Finite coefficient list c_0..c_K of a formal power series in one
// variable. The coefficient mode (exact rational vs floating point) is
// the Scalar type; mixing modes is a compile error and conversion goes
// through to_float()/to_exact() only. Binary operations truncate to the
// smaller K of the two operands and never extend it.
template <typename Scalar>
class TruncatedSeries {
public:
    TruncatedSeries() : c_(1, ScalarTraits<Scalar>::zero()) {}

    explicit TruncatedSeries(std::vector<Scalar> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) throw std::invalid_argument("TruncatedSeries: needs at least c_0");
    }

    static TruncatedSeries zero(int order) {
        return TruncatedSeries(std::vector<Scalar>(order + 1, ScalarTraits<Scalar>::zero()));
    }
    static TruncatedSeries constant(const Scalar& value, int order) {
        TruncatedSeries s = zero(order);
        s.c_[0] = value;
        return s;
    }
    // The series "x" itself.
    static TruncatedSeries identity(int order) {
        if (order < 1) throw std::invalid_argument("TruncatedSeries::identity: order >= 1 required");
        TruncatedSeries s = zero(order);
        s.c_[1] = ScalarTraits<Scalar>::one();
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }

    const Scalar& operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
    Scalar& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

    const std::vector<Scalar>& coefficients() const { return c_; }

    // Index of the lowest nonzero coefficient, or order()+1 for the zero series.
    int valuation() const {
        for (int k = 0; k <= order(); ++k)
            if (!ScalarTraits<Scalar>::is_zero(c_[k])) return k;
        return order() + 1;
    }

    TruncatedSeries truncated(int new_order) const {
        if (new_order >= order()) return *this;
        return TruncatedSeries(std::vector<Scalar>(c_.begin(), c_.begin() + new_order + 1));
    }

    // Zero-padded to a higher order.
    TruncatedSeries extended(int new_order) const {
        if (new_order <= order()) return truncated(new_order);
        std::vector<Scalar> c = c_;
        c.resize(static_cast<std::size_t>(new_order) + 1, ScalarTraits<Scalar>::zero());
        return TruncatedSeries(std::move(c));
    }

    // Horner evaluation of the polynomial part.
    Scalar operator()(const Scalar& x) const {
        Scalar acc = ScalarTraits<Scalar>::zero();
        for (int k = order(); k >= 0; --k) acc = acc * x + c_[k];
        return acc;
    }

private:
    std::vector<Scalar> c_;
};

template <typename Scalar>
bool operator==(const TruncatedSeries<Scalar>& a, const TruncatedSeries<Scalar>& b) {
    if (a.order() != b.order()) return false;
    for (int k = 0; k <= a.order(); ++k)
        if (!(a[k] == b[k])) return false;
    return true;
}

template <typename Scalar>
TruncatedSeries<Scalar> operator+(const TruncatedSeries<Scalar>& a, const TruncatedSeries<Scalar>& b) {
    const int n = std::min(a.order(), b.order());
    auto r = TruncatedSeries<Scalar>::zero(n);
    for (int k = 0; k <= n; ++k) r[k] = a[k] + b[k];
    return r;
}

template <typename Scalar>
TruncatedSeries<Scalar> operator-(const TruncatedSeries<Scalar>& a, const TruncatedSeries<Scalar>& b) {
    const int n = std::min(a.order(), b.order());
    auto r = TruncatedSeries<Scalar>::zero(n);
    for (int k = 0; k <= n; ++k) r[k] = a[k] - b[k];
    return r;
}

template <typename Scalar>
TruncatedSeries<Scalar> operator-(const TruncatedSeries<Scalar>& a) {
    auto r = a;
    for (int k = 0; k <= r.order(); ++k) r[k] = -r[k];
    return r;
}

template <typename Scalar>
TruncatedSeries<Scalar> operator*(const Scalar& s, const TruncatedSeries<Scalar>& a) {
    auto r = a;
    for (int k = 0; k <= r.order(); ++k) r[k] = s * r[k];
    return r;
}

// Cauchy product, truncated to min(K_a, K_b).
template <typename Scalar>
TruncatedSeries<Scalar> operator*(const TruncatedSeries<Scalar>& a, const TruncatedSeries<Scalar>& b) {
    const int n = std::min(a.order(), b.order());
    auto r = TruncatedSeries<Scalar>::zero(n);
    for (int i = 0; i <= n; ++i) {
        if (ScalarTraits<Scalar>::is_zero(a[i])) continue;
        for (int j = 0; i + j <= n; ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

template <typename Scalar>
TruncatedSeries<Scalar> series_product(const TruncatedSeries<Scalar>& a, const TruncatedSeries<Scalar>& b) {
    return a * b;
}

// Coefficients of outer(inner(x)) up to min(K_outer, K_inner); requires
// inner(0) = 0 so that the composition is well defined order by order.
template <typename Scalar>
TruncatedSeries<Scalar> series_compose(const TruncatedSeries<Scalar>& outer, const TruncatedSeries<Scalar>& inner) {
    if (!ScalarTraits<Scalar>::is_zero(inner[0]))
        throw std::invalid_argument("series_compose: inner series must have zero constant term");
    const int n = std::min(outer.order(), inner.order());
    const auto in = inner.truncated(n);
    auto acc = TruncatedSeries<Scalar>::zero(n);
    for (int k = std::min(n, outer.order()); k >= 0; --k) {
        acc = acc * in;
        acc[0] += outer[k];
    }
    return acc;
}

// Term-by-term derivative, order K-1.
template <typename Scalar>
TruncatedSeries<Scalar> series_derivative(const TruncatedSeries<Scalar>& a) {
    if (a.order() < 1) throw std::invalid_argument("series_derivative: order >= 1 required");
    auto r = TruncatedSeries<Scalar>::zero(a.order() - 1);
    for (int k = 1; k <= a.order(); ++k) r[k - 1] = ScalarTraits<Scalar>::from_int(k) * a[k];
    return r;
}

// Antiderivative with zero constant, order K+1.
template <typename Scalar>
TruncatedSeries<Scalar> series_antiderivative(const TruncatedSeries<Scalar>& a) {
    auto r = TruncatedSeries<Scalar>::zero(a.order() + 1);
    for (int k = 0; k <= a.order(); ++k)
        r[k + 1] = a[k] / ScalarTraits<Scalar>::from_int(k + 1);
    return r;
}

// 1/a for a with nonzero constant term.
template <typename Scalar>
TruncatedSeries<Scalar> series_reciprocal(const TruncatedSeries<Scalar>& a) {
    if (ScalarTraits<Scalar>::is_zero(a[0]))
        throw std::invalid_argument("series_reciprocal: constant term must be nonzero");
    const int n = a.order();
    auto r = TruncatedSeries<Scalar>::zero(n);
    r[0] = ScalarTraits<Scalar>::one() / a[0];
    for (int k = 1; k <= n; ++k) {
        Scalar s = ScalarTraits<Scalar>::zero();
        for (int j = 1; j <= k; ++j) s += a[j] * r[k - j];
        r[k] = -(s / a[0]);
    }
    return r;
}

// exp of a series with zero constant term, via c'_k = (1/k) sum j a_j c_{k-j}.
template <typename Scalar>
TruncatedSeries<Scalar> series_exp(const TruncatedSeries<Scalar>& a) {
    if (!ScalarTraits<Scalar>::is_zero(a[0]))
        throw std::invalid_argument("series_exp: constant term must be zero");
    const int n = a.order();
    auto r = TruncatedSeries<Scalar>::zero(n);
    r[0] = ScalarTraits<Scalar>::one();
    for (int k = 1; k <= n; ++k) {
        Scalar s = ScalarTraits<Scalar>::zero();
        for (int j = 1; j <= k; ++j) s += ScalarTraits<Scalar>::from_int(j) * a[j] * r[k - j];
        r[k] = s / ScalarTraits<Scalar>::from_int(k);
    }
    return r;
}

// Explicit mode casts.
inline TruncatedSeries<double> to_float(const TruncatedSeries<Rational>& a) {
    std::vector<double> c(static_cast<std::size_t>(a.order()) + 1);
    for (int k = 0; k <= a.order(); ++k) c[static_cast<std::size_t>(k)] = a[k].to_double();
    return TruncatedSeries<double>(std::move(c));
}

template <typename Scalar>
Scalar factorial(int n) {
    Scalar f = ScalarTraits<Scalar>::one();
    for (int i = 2; i <= n; ++i) f = f * ScalarTraits<Scalar>::from_int(i);
    return f;
}

// A few stock series used across the modules and tests.
namespace stock {

template <typename Scalar>
TruncatedSeries<Scalar> geometric(int order, const Scalar& ratio = ScalarTraits<Scalar>::one()) {
    auto s = TruncatedSeries<Scalar>::zero(order);
    Scalar p = ScalarTraits<Scalar>::one();
    for (int k = 0; k <= order; ++k) { s[k] = p; p = p * ratio; }
    return s;
}

template <typename Scalar>
TruncatedSeries<Scalar> sin_series(int order) {
    auto s = TruncatedSeries<Scalar>::zero(order);
    Scalar term = ScalarTraits<Scalar>::one();
    for (int k = 1; k <= order; k += 2) {
        // term = (-1)^((k-1)/2) / k!
        s[k] = term / factorial<Scalar>(k);
        term = -term;
    }
    return s;
}

template <typename Scalar>
TruncatedSeries<Scalar> exp_series(int order) {
    auto s = TruncatedSeries<Scalar>::zero(order);
    for (int k = 0; k <= order; ++k) s[k] = ScalarTraits<Scalar>::one() / factorial<Scalar>(k);
    return s;
}

template <typename Scalar>
TruncatedSeries<Scalar> log1p_series(int order) {
    auto s = TruncatedSeries<Scalar>::zero(order);
    for (int k = 1; k <= order; ++k) {
        s[k] = ScalarTraits<Scalar>::one() / ScalarTraits<Scalar>::from_int(k);
        if (k % 2 == 0) s[k] = -s[k];
    }
    return s;
}

} // namespace stock

} // namespace pslab
