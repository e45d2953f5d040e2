#pragma once

#include <map>
#include <cmath>
#include <stdexcept>
#include <type_traits>

#include "pslab/rational.hpp"

namespace pslab {

// Finite map from harmonic index n >= 0 to cos/sin coefficients:
//   p(x) = sum_n  c_n cos(n x) + s_n sin(n x),  s_0 unused.
// Products use the product-to-sum identities, so exact (Rational)
// coefficients stay exact.
template <typename Scalar>
class TrigPoly {
public:
    struct Coef {
        Scalar c = ScalarTraits<Scalar>::zero();
        Scalar s = ScalarTraits<Scalar>::zero();
    };

    TrigPoly() = default;

    static TrigPoly constant(const Scalar& v) {
        TrigPoly p;
        p.add_cos(0, v);
        return p;
    }
    static TrigPoly harmonic_sin(int n, const Scalar& v) {
        TrigPoly p;
        p.add_sin(n, v);
        return p;
    }
    static TrigPoly harmonic_cos(int n, const Scalar& v) {
        TrigPoly p;
        p.add_cos(n, v);
        return p;
    }

    void add_cos(int n, const Scalar& v) {
        if (n < 0) throw std::invalid_argument("TrigPoly: harmonic index must be >= 0");
        if (ScalarTraits<Scalar>::is_zero(v)) return;
        auto& e = terms_[n];
        e.c += v;
        prune(n);
    }
    void add_sin(int n, const Scalar& v) {
        if (n <= 0) throw std::invalid_argument("TrigPoly: sine harmonic index must be >= 1");
        if (ScalarTraits<Scalar>::is_zero(v)) return;
        auto& e = terms_[n];
        e.s += v;
        prune(n);
    }

    Scalar cos_coef(int n) const {
        auto it = terms_.find(n);
        return it == terms_.end() ? ScalarTraits<Scalar>::zero() : it->second.c;
    }
    Scalar sin_coef(int n) const {
        auto it = terms_.find(n);
        return it == terms_.end() ? ScalarTraits<Scalar>::zero() : it->second.s;
    }

    const std::map<int, Coef>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    int max_harmonic() const { return terms_.empty() ? 0 : terms_.rbegin()->first; }

    TrigPoly& operator+=(const TrigPoly& o) {
        for (const auto& [n, e] : o.terms_) {
            if (!ScalarTraits<Scalar>::is_zero(e.c)) add_cos(n, e.c);
            if (!ScalarTraits<Scalar>::is_zero(e.s)) add_sin(n, e.s);
        }
        return *this;
    }

    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }

    friend TrigPoly operator*(const Scalar& v, const TrigPoly& p) {
        TrigPoly r;
        if (ScalarTraits<Scalar>::is_zero(v)) return r;
        for (const auto& [n, e] : p.terms_) {
            if (!ScalarTraits<Scalar>::is_zero(e.c)) r.add_cos(n, v * e.c);
            if (!ScalarTraits<Scalar>::is_zero(e.s)) r.add_sin(n, v * e.s);
        }
        return r;
    }

    // cos a cos b = (cos(a-b)+cos(a+b))/2, sin a sin b = (cos(a-b)-cos(a+b))/2,
    // sin a cos b = (sin(a-b)+sin(a+b))/2, with sin(-n x) = -sin(n x).
    friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
        const Scalar half = ScalarTraits<Scalar>::one() / ScalarTraits<Scalar>::from_int(2);
        TrigPoly r;
        for (const auto& [n, ea] : a.terms_) {
            for (const auto& [m, eb] : b.terms_) {
                const int d = n - m, s = n + m;
                if (!ScalarTraits<Scalar>::is_zero(ea.c) && !ScalarTraits<Scalar>::is_zero(eb.c)) {
                    const Scalar v = half * ea.c * eb.c;
                    r.accum_cos(d, v);
                    r.accum_cos(s, v);
                }
                if (!ScalarTraits<Scalar>::is_zero(ea.s) && !ScalarTraits<Scalar>::is_zero(eb.s)) {
                    const Scalar v = half * ea.s * eb.s;
                    r.accum_cos(d, v);
                    r.accum_cos(s, -v);
                }
                if (!ScalarTraits<Scalar>::is_zero(ea.s) && !ScalarTraits<Scalar>::is_zero(eb.c)) {
                    const Scalar v = half * ea.s * eb.c;
                    r.accum_sin(d, v);
                    r.accum_sin(s, v);
                }
                if (!ScalarTraits<Scalar>::is_zero(ea.c) && !ScalarTraits<Scalar>::is_zero(eb.s)) {
                    const Scalar v = half * ea.c * eb.s;
                    r.accum_sin(-d, v);
                    r.accum_sin(s, v);
                }
            }
        }
        r.prune_all();
        return r;
    }

    // d/dx: cos(nx) -> -n sin(nx), sin(nx) -> n cos(nx).
    friend TrigPoly derivative(const TrigPoly& p) {
        TrigPoly r;
        for (const auto& [n, e] : p.terms_) {
            if (n == 0) continue;
            const Scalar fn = ScalarTraits<Scalar>::from_int(n);
            if (!ScalarTraits<Scalar>::is_zero(e.s)) r.add_cos(n, fn * e.s);
            if (!ScalarTraits<Scalar>::is_zero(e.c)) r.add_sin(n, -(fn * e.c));
        }
        return r;
    }

    // Antiderivative for polynomials with no constant mode.
    friend TrigPoly antiderivative(const TrigPoly& p) {
        TrigPoly r;
        for (const auto& [n, e] : p.terms_) {
            if (n == 0) {
                if (!ScalarTraits<Scalar>::is_zero(e.c))
                    throw std::invalid_argument("TrigPoly: constant mode has no periodic antiderivative");
                continue;
            }
            const Scalar fn = ScalarTraits<Scalar>::from_int(n);
            if (!ScalarTraits<Scalar>::is_zero(e.c)) r.add_sin(n, e.c / fn);
            if (!ScalarTraits<Scalar>::is_zero(e.s)) r.add_cos(n, -(e.s / fn));
        }
        return r;
    }

    double evaluate(double x) const {
        double acc = 0.0;
        for (const auto& [n, e] : terms_)
            acc += ScalarTraits<Scalar>::to_double(e.c) * std::cos(n * x) +
                   ScalarTraits<Scalar>::to_double(e.s) * std::sin(n * x);
        return acc;
    }

    template <typename Real>
    Real evaluate_as(Real x) const {
        const auto widen = [](const Scalar& v) -> Real {
            if constexpr (std::is_floating_point_v<Scalar>)
                return static_cast<Real>(v);
            else
                return static_cast<Real>(ScalarTraits<Scalar>::to_double(v));
        };
        Real acc = 0;
        for (const auto& [n, e] : terms_)
            acc += widen(e.c) * std::cos(static_cast<Real>(n) * x) +
                   widen(e.s) * std::sin(static_cast<Real>(n) * x);
        return acc;
    }

private:
    void accum_cos(int n, const Scalar& v) {
        terms_[n < 0 ? -n : n].c += v;  // cos is even
    }
    void accum_sin(int n, const Scalar& v) {
        if (n == 0) return;  // sin(0) = 0
        if (n < 0)
            terms_[-n].s -= v;
        else
            terms_[n].s += v;
    }
    void prune(int n) {
        auto it = terms_.find(n);
        if (it != terms_.end() && ScalarTraits<Scalar>::is_zero(it->second.c) &&
            ScalarTraits<Scalar>::is_zero(it->second.s))
            terms_.erase(it);
    }
    void prune_all() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (ScalarTraits<Scalar>::is_zero(it->second.c) && ScalarTraits<Scalar>::is_zero(it->second.s))
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    std::map<int, Coef> terms_;
};

inline TrigPoly<double> to_float(const TrigPoly<Rational>& p) {
    TrigPoly<double> r;
    for (const auto& [n, e] : p.terms()) {
        if (!e.c.is_zero()) r.add_cos(n, e.c.to_double());
        if (!e.s.is_zero()) r.add_sin(n, e.s.to_double());
    }
    return r;
}

} // namespace pslab
