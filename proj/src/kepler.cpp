#include "pslab/kepler.hpp"
#include "pslab/inversion.hpp"

#include <complex>
#include <limits>

namespace pslab {

std::vector<TrigPoly<Rational>> series_coefficients(int K) {
    if (K < 1 || K > 30) throw std::invalid_argument("series_coefficients: 1 <= K <= 30 in exact mode");
    return kepler_coefficients<Rational>(K);
}

SeriesEval<double> lagrange_series(double e, double l, int K) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("lagrange_series: 0 <= e < 1");
    return lagrange_series_eval<double>(e, l, K);
}

namespace {

// Ascending series J_n(x) = sum_m (-1)^m (x/2)^{n+2m} / (m! (n+m)!),
// usable without cancellation while the terms decrease from the start.
double bessel_ascending(int n, double x) {
    const double half = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= n; ++i) term *= half / static_cast<double>(i);
    double sum = term;
    for (int m = 1; m < 256; ++m) {
        term *= -(half * half) / (static_cast<double>(m) * static_cast<double>(n + m));
        sum += term;
        if (std::abs(term) < 1e-18 * std::max(std::abs(sum), 1e-300)) break;
    }
    return sum;
}

// Miller's algorithm: backward recurrence from a start order well above n,
// normalized with J_0 + 2 sum_k J_{2k} = 1.
double bessel_miller(int n, double x) {
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    const int start = n + 16 + static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(n) + 1.0) + x));
    double jp = 0.0;   // J_{m+1}
    double j = 1e-30;  // J_m (arbitrary scale)
    double jn = 0.0;
    double norm = 0.0;
    for (int m = start; m >= 1; --m) {
        double jm = (2.0 * m / x) * j - jp;
        jp = j;
        j = jm;
        if (!std::isfinite(j) || std::abs(j) > 1e280) {
            j *= 1e-280;
            jp *= 1e-280;
            jn *= 1e-280;
            norm *= 1e-280;
        }
        if (m - 1 == n) jn = j;  // j now holds J_{m-1}
        if ((m - 1) % 2 == 0) norm += (m - 1 == 0 ? 1.0 : 2.0) * j;
    }
    return jn / norm;
}

} // namespace

double bessel_jn(int n, double x) {
    if (n < 0) throw std::invalid_argument("bessel_jn: n >= 0");
    if (x < 0.0) throw std::invalid_argument("bessel_jn: x >= 0");
    if (n == 0 && x == 0.0) return 1.0;
    if (x == 0.0) return 0.0;
    const double series_limit = std::min(0.5 * n, 2.0 * std::sqrt(static_cast<double>(n) + 1.0));
    if (x <= std::max(series_limit, 1.5)) return bessel_ascending(n, x);
    if (x <= static_cast<double>(n)) return bessel_miller(n, x);
    // x > n: forward recurrence is stable; seed with J0, J1 from Miller at
    // order 1 (their ascending series cancel badly for large x).
    double jm1 = bessel_miller(0, x);
    double j = bessel_miller(1, x);
    if (n == 0) return jm1;
    for (int m = 1; m < n; ++m) {
        const double jp = (2.0 * m / x) * j - jm1;
        jm1 = j;
        j = jp;
    }
    return j;
}

double bessel_series(double e, double l, int N) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("bessel_series: 0 <= e < 1");
    if (N < 1) throw std::invalid_argument("bessel_series: N >= 1");
    double sum = l, comp = 0.0;
    for (int n = 1; n <= N; ++n) {
        const double term = (2.0 / n) * bessel_jn(n, n * e) * std::sin(n * l);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

namespace {

// f(r) = r exp(s)/(1+s), s = sqrt(1+r^2);  f'(r) = exp(s)/(1+s) (1 + r^2/(1+s)).
double laplace_f(double r) {
    const double s = std::sqrt(1.0 + r * r);
    return r * std::exp(s) / (1.0 + s);
}

} // namespace

double laplace_limit(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("laplace_limit: tol > 0");
    double lo = 0.5, hi = 1.0;
    for (int i = 0; i < 40; ++i) {
        const double mid = 0.5 * (lo + hi);
        (laplace_f(mid) < 1.0 ? lo : hi) = mid;
    }
    double r = 0.5 * (lo + hi);
    for (int i = 0; i < 8; ++i) {
        const double s = std::sqrt(1.0 + r * r);
        const double f = r * std::exp(s) / (1.0 + s);
        const double df = std::exp(s) / (1.0 + s) * (1.0 + r * r / (1.0 + s));
        r -= (f - 1.0) / df;
        if (std::abs(f - 1.0) <= tol) break;
    }
    return r;
}

double eta_modulus_at_imaginary(double r) {
    const std::complex<double> z(0.0, r);
    const std::complex<double> s = std::sqrt(1.0 - z * z);
    return std::abs(z * std::exp(s) / (1.0 + s));
}

double eta_map(double e) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("eta_map: 0 <= e < 1");
    const double s = std::sqrt(1.0 - e * e);
    return e * std::exp(s) / (1.0 + s);
}

namespace {

// Taylor pieces of eta(e) in long double; the even coefficients are
// exactly zero by construction (every factor is an even series).
TruncatedSeries<long double> eta_taylor_ld(int K) {
    using S = TruncatedSeries<long double>;
    // sqrt(1-e^2) = sum_j binom(1/2, j) (-e^2)^j
    S root = S::zero(K);
    long double b = 1.0L;  // binom(1/2, j) * (-1)^j
    for (int j = 0; 2 * j <= K; ++j) {
        root[2 * j] = b;
        b *= -(0.5L - static_cast<long double>(j)) / static_cast<long double>(j + 1);
    }
    S root_m1 = root;
    root_m1[0] = 0.0L;
    const S exp_part = std::exp(1.0L) * series_exp(root_m1);
    S denom = root;
    denom[0] += 1.0L;
    const S g = exp_part * series_reciprocal(denom);   // eta(e)/e
    return S::identity(K) * g;
}

} // namespace

TruncatedSeries<double> eta_taylor(int K) {
    const auto ld = eta_taylor_ld(K);
    std::vector<double> c(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) c[static_cast<std::size_t>(k)] = static_cast<double>(ld[k]);
    return TruncatedSeries<double>(std::move(c));
}

EtaResummed eta_resummed_series(double e, double l, int K) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("eta_resummed_series: 0 <= e < 1");
    using S = TruncatedSeries<long double>;

    // e-series of xi - l at this l.
    const auto coef = kepler_coefficients<long double>(K);
    S xi_e = S::zero(K);
    for (int k = 1; k <= K; ++k)
        xi_e[k] = coef[static_cast<std::size_t>(k - 1)].evaluate_as<long double>(static_cast<long double>(l));

    // Reversion e(eta): normalize eta(e)/c1 = e - phi(e), phi of valuation 2,
    // invert, then rescale the variable back by c1. The linear coefficient
    // is forced to zero rather than computed as 1 - c1/c1.
    const S eta = eta_taylor_ld(K);
    const long double c1 = eta[1];
    S phi = S::zero(K);
    for (int k = 2; k <= K; ++k) phi[k] = -(eta[k] / c1);
    const auto e_of_alpha = invert_series(FunctionJet<long double>::scalar(phi), K);
    S e_of_eta = S::zero(K);
    long double c1k = 1.0L;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) c1k *= c1;
        e_of_eta[k] = e_of_alpha[k] / c1k;
    }

    const S xi_eta = series_compose(xi_e, e_of_eta);

    EtaResummed out;
    out.eta = eta_map(e);
    out.eta_coefficients.reserve(static_cast<std::size_t>(K) + 1);
    for (int k = 0; k <= K; ++k) out.eta_coefficients.push_back(static_cast<double>(xi_eta[k]));

    long double sum = static_cast<long double>(l);
    long double etak = 1.0L;
    out.partial_sums.reserve(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        etak *= static_cast<long double>(out.eta);
        sum += xi_eta[k] * etak;
        out.partial_sums.push_back(static_cast<double>(sum));
    }
    out.value = static_cast<double>(sum);
    return out;
}

double true_anomaly_exact(double e, double l, double tol) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("true_anomaly_exact: 0 <= e < 1");
    const double xi = kepler_newton<double>(e, l, tol);
    // Half-angle form keeps u continuous and increasing for xi in [0, 2pi).
    const double u = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * xi),
                                      std::sqrt(1.0 - e) * std::cos(0.5 * xi));
    return u < 0.0 ? u + 2.0 * M_PI : u;
}

double true_anomaly_series(double e, double l, int K) {
    if (!(e >= 0.0 && e < 1.0)) throw std::invalid_argument("true_anomaly_series: 0 <= e < 1");
    using TP = TrigPoly<long double>;
    const long double el = static_cast<long double>(e);

    // psi'(l) = sqrt(1-e^2)/(1 - e cos l) = 1 + 2 sum beta^n cos(n l).
    const long double beta = el / (1.0L + std::sqrt(1.0L - el * el));
    TP psi = TP::constant(1.0L);
    if (beta > 0.0L) {
        const int n_psi = std::min(2000, std::max(8, static_cast<int>(std::ceil(-41.5L / std::log(beta)))));
        long double bn = 1.0L;
        for (int n = 1; n <= n_psi; ++n) {
            bn *= beta;
            psi.add_cos(n, 2.0L * bn);
        }
    }

    const auto sin1 = TP::harmonic_sin(1, 1.0L);
    auto sin_pow = TP::constant(1.0L);
    TP dudl = psi;
    long double ek = 1.0L;
    for (int k = 1; k <= K; ++k) {
        sin_pow = sin_pow * sin1;
        ek *= el;
        auto term = sin_pow * psi;
        for (int j = 1; j <= k; ++j)
            term = (1.0L / static_cast<long double>(j)) * derivative(term);
        dudl += ek * term;
    }

    // Integrate per harmonic; the constant mode contributes c0 * l and the
    // oscillatory part vanishes at l = 0 (pure cosine input).
    const long double c0 = dudl.cos_coef(0);
    TP osc = dudl;
    long double u = c0 * static_cast<long double>(l);
    for (const auto& [n, coefs] : osc.terms()) {
        if (n == 0) continue;
        // cos(n l) integrates to sin(n l)/n, sin(n l) to (1 - cos(n l))/n.
        u += coefs.c * std::sin(static_cast<long double>(n) * static_cast<long double>(l)) / static_cast<long double>(n);
        u += coefs.s * (1.0L - std::cos(static_cast<long double>(n) * static_cast<long double>(l))) / static_cast<long double>(n);
    }
    return static_cast<double>(u);
}

OrbitPoint orbit_point(double e, double l, double tol) {
    OrbitPoint p;
    p.eccentricity = e;
    p.mean_anomaly = l;
    p.eccentric_anomaly = kepler_newton<double>(e, l, tol);
    p.true_anomaly = true_anomaly_exact(e, l, tol);
    return p;
}

} // namespace pslab
