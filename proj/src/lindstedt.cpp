#include "pslab/lindstedt.hpp"

#include <algorithm>
#include <cmath>

namespace pslab {

SmallDivisorReport small_divisor_report(const std::vector<double>& omega, double tau, int cutoff,
                                        std::size_t keep) {
    const int d = static_cast<int>(omega.size());
    if (d < 1 || d > 4) throw std::invalid_argument("small_divisor_report: 1 <= d <= 4");
    if (cutoff < 1) throw std::invalid_argument("small_divisor_report: cutoff >= 1");
    double combos = 1.0;
    for (int a = 0; a < d; ++a) combos *= 2.0 * cutoff + 1.0;
    if (combos > 2e6) throw std::invalid_argument("small_divisor_report: cutoff exceeds the combination guard");

    SmallDivisorReport report;
    std::vector<SmallDivisor> all;

    std::vector<int> nu(static_cast<std::size_t>(d), -cutoff);
    while (true) {
        int l1 = 0;
        for (int a = 0; a < d; ++a) l1 += std::abs(nu[static_cast<std::size_t>(a)]);
        bool canonical = false;
        for (int a = 0; a < d; ++a) {
            if (nu[static_cast<std::size_t>(a)] > 0) { canonical = true; break; }
            if (nu[static_cast<std::size_t>(a)] < 0) break;
        }
        if (l1 >= 1 && l1 <= cutoff && canonical) {
            ++report.combinations;
            double dot = 0.0;
            for (int a = 0; a < d; ++a) dot += omega[static_cast<std::size_t>(a)] * nu[static_cast<std::size_t>(a)];
            if (dot == 0.0) throw std::runtime_error("small_divisor_report: resonant frequency");
            SmallDivisor e;
            e.nu = nu;
            e.omega_dot_nu = std::abs(dot);
            all.push_back(std::move(e));
        }
        int a = 0;
        for (; a < d; ++a) {
            if (++nu[static_cast<std::size_t>(a)] <= cutoff) break;
            nu[static_cast<std::size_t>(a)] = -cutoff;
        }
        if (a == d) break;
    }

    // Empirical best C0 for the given tau, then the per-entry bounds.
    double c0 = 0.0;
    for (const auto& e : all) {
        int l1 = 0;
        for (int v : e.nu) l1 += std::abs(v);
        c0 = std::max(c0, std::pow(static_cast<double>(l1), -tau) / e.omega_dot_nu);
    }
    report.best_C0 = c0;

    std::sort(all.begin(), all.end(),
              [](const SmallDivisor& x, const SmallDivisor& y) { return x.omega_dot_nu < y.omega_dot_nu; });
    if (all.size() > keep) all.resize(keep);
    for (auto& e : all) {
        int l1 = 0;
        for (int v : e.nu) l1 += std::abs(v);
        e.diophantine_bound = std::pow(static_cast<double>(l1), -tau) / c0;
        report.worst.push_back(std::move(e));
    }
    return report;
}

Potential<1, double> pendulum_potential() { return pendulum_potential_t<double>(); }

std::array<double, 1> pendulum_omega() { return pendulum_omega_t<double>(); }

Potential<1, Rational> pendulum_potential_exact() {
    Potential<1, Rational> f;
    f.add_mode({1}, Rational(1, 2));
    return f;
}

std::array<Rational, 1> pendulum_omega_exact() { return {Rational(1)}; }

Potential<2, double> golden_potential() { return golden_potential_t<double>(); }

std::array<double, 2> golden_omega() { return golden_omega_t<double>(); }

} // namespace pslab
