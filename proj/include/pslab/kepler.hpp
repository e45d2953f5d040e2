#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pslab/trig_poly.hpp"
#include "pslab/series.hpp"

namespace pslab {

// Convention used throughout: l = xi - e sin(xi) (mean anomaly from
// eccentric anomaly, angles from periapsis), the one consistent with the
// series xi = l + sum_k (e^k/k!) d^{k-1} sin^k(l).
struct OrbitPoint {
    double eccentricity = 0.0;
    double mean_anomaly = 0.0;
    double eccentric_anomaly = 0.0;
    double true_anomaly = 0.0;
};

// Newton iteration for xi - e sin(xi) = l, started at xi0 = l + e sin(l);
// quadratic convergence for e < 1. Throws after max_iter without meeting
// tol on the residual.
template <typename Real>
Real kepler_newton(Real e, Real l, Real tol, int max_iter = 64) {
    if (!(e >= Real(0) && e < Real(1))) throw std::invalid_argument("kepler_newton: 0 <= e < 1");
    if (!(tol > Real(0))) throw std::invalid_argument("kepler_newton: tol > 0");
    Real xi = l + e * std::sin(l);
    for (int it = 0; it < max_iter; ++it) {
        const Real f = xi - e * std::sin(xi) - l;
        if (std::abs(f) <= tol) return xi;
        xi -= f / (Real(1) - e * std::cos(xi));
    }
    if (std::abs(xi - e * std::sin(xi) - l) <= tol) return xi;
    throw std::runtime_error("kepler_newton: no convergence within iteration budget");
}

inline double newton_solve(double e, double l, double tol) { return kepler_newton<double>(e, l, tol); }

// Coefficient polynomials (1/k!) d^{k-1} sin^k(l) for k = 1..K; order-k
// polynomial carries only harmonics n <= k with n = k (mod 2). Expanding
// sin^k over exponentials first gives one term per harmonic,
//   sin(n l) coefficient = (-1)^m C(k,m) n^{k-1} / (2^{k-1} k!),  n = k - 2m,
// built as an incremental product so intermediates stay near the result
// (the term-by-term derivative route overflows exact 128-bit coefficients
// near k = 29; the two routes are cross-checked in the tests).
template <typename Scalar>
std::vector<TrigPoly<Scalar>> kepler_coefficients(int K) {
    std::vector<TrigPoly<Scalar>> out;
    out.reserve(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        TrigPoly<Scalar> p;
        for (int m = 0; 2 * m < k; ++m) {
            const int n = k - 2 * m;
            Scalar r = ScalarTraits<Scalar>::one();
            for (int i = 0; i < m; ++i)
                r = r * ScalarTraits<Scalar>::from_int(k - i) / ScalarTraits<Scalar>::from_int(i + 1);
            r = r / ScalarTraits<Scalar>::from_int(k);
            for (int j = 1; j <= k - 1; ++j)
                r = r * ScalarTraits<Scalar>::from_int(n) / ScalarTraits<Scalar>::from_int(2 * j);
            if (m % 2 == 1) r = -r;
            p.add_sin(n, r);
        }
        out.push_back(std::move(p));
    }
    return out;
}

// Exact-mode guard per the 128-bit coefficient budget.
std::vector<TrigPoly<Rational>> series_coefficients(int K);

template <typename Real>
struct SeriesEval {
    Real value = Real(0);
    std::vector<Real> term_magnitudes;
    bool diverging = false;
};

// Partial sum l + sum_{k<=K} e^k P_k(l) with per-order magnitudes; a
// growing tail sets the divergence flag instead of raising.
template <typename Real>
SeriesEval<Real> lagrange_series_eval(Real e, Real l, int K) {
    const auto coef = kepler_coefficients<Real>(K);
    SeriesEval<Real> out;
    Real sum = l, comp = Real(0);
    Real ek = Real(1);
    for (int k = 1; k <= K; ++k) {
        ek *= e;
        const Real term = ek * coef[static_cast<std::size_t>(k - 1)].template evaluate_as<Real>(l);
        out.term_magnitudes.push_back(std::abs(term));
        const Real y = term - comp;
        const Real t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    out.value = sum;
    const std::size_t m = out.term_magnitudes.size();
    if (m >= 8) {
        Real late = Real(0), mid = Real(0);
        for (std::size_t i = m - 3; i < m; ++i) late = std::max(late, out.term_magnitudes[i]);
        for (std::size_t i = m / 2; i < m / 2 + 3; ++i) mid = std::max(mid, out.term_magnitudes[i]);
        out.diverging = late > mid && late > Real(1e-18);
    }
    return out;
}

SeriesEval<double> lagrange_series(double e, double l, int K);

// J_n(x) for n >= 0, 0 <= x: ascending series in the monotone-term region,
// Miller backward recurrence otherwise (the x < n regime this module
// needs), forward recurrence from J0, J1 when x > n.
double bessel_jn(int n, double x);

// xi = l + sum_{n=1..N} (2/n) J_n(n e) sin(n l).
double bessel_series(double e, double l, int N);

// Root r* of r exp(sqrt(1+r^2))/(1+sqrt(1+r^2)) = 1 (bisection + Newton).
double laplace_limit(double tol);

// |eta(i r)| evaluated in complex arithmetic; equals 1 at r = r*.
double eta_modulus_at_imaginary(double r);

// eta(e) = e exp(sqrt(1-e^2)) / (1 + sqrt(1-e^2)), strictly increasing,
// eta(0) = 0, eta(1^-) = 1^-.
double eta_map(double e);

// Taylor coefficients of eta(e) around 0 (odd series), order K.
TruncatedSeries<double> eta_taylor(int K);

struct EtaResummed {
    double value = 0.0;
    double eta = 0.0;
    std::vector<double> partial_sums;    // per-order partial sums in eta
    std::vector<double> eta_coefficients;
};

// Recasts the e-series of xi - l as a power series in eta (reversion of
// eta(e) built via invert_series) and evaluates it at eta(e).
EtaResummed eta_resummed_series(double e, double l, int K);

// True anomaly from the closed form u = 2 atan(sqrt((1+e)/(1-e)) tan(xi/2)),
// evaluated continuously in l over [0, 2pi).
double true_anomaly_exact(double e, double l, double tol = 1e-14);

// Series route: du/dl = psi'(l) + sum_k e^k (1/k!) d^k( sin^k(l) psi'(l) )
// with psi'(l) = sqrt(1-e^2)/(1 - e cos l) expanded in its cosine series,
// integrated per harmonic with u(0) = 0.
double true_anomaly_series(double e, double l, int K);

OrbitPoint orbit_point(double e, double l, double tol = 1e-14);

} // namespace pslab
