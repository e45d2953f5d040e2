#include "pslab/summation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pslab {

namespace {

// Sum a_n w^n until the partial sums stagnate at machine precision: the
// running tail stays below eps * scale for a full stretch of terms.
struct TailSum {
    double value = 0.0;
    long long used = 0;
    bool stabilized = false;
};

TailSum sum_to_stagnation(const TermGenerator& g, double w, long long max_terms) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr int stretch = 24;
    TailSum out;
    double sum = 0.0, comp = 0.0;  // Kahan compensation
    double scale = 0.0;
    double wn = 1.0;
    int quiet = 0;
    for (long long n = 1; n <= max_terms; ++n) {
        wn *= w;
        const double term = g(n) * wn;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        scale = std::max(scale, std::abs(sum));
        if (std::abs(term) <= eps * std::max(scale, 1e-300)) {
            if (++quiet >= stretch) {
                out.value = sum;
                out.used = n;
                out.stabilized = true;
                return out;
            }
        } else {
            quiet = 0;
        }
        if (!std::isfinite(sum)) break;
        out.used = n;
    }
    out.value = sum;
    return out;
}

// Order-1 Cesaro mean of the partial sums at r = 1, run to stagnation of
// the averaged sequence.
void cesaro_mean(const TermGenerator& g, long long max_terms, double& value, bool& stabilized) {
    double partial = 0.0;
    double partial_acc = 0.0;
    double prev_mean = std::numeric_limits<double>::quiet_NaN();
    int quiet = 0;
    stabilized = false;
    value = 0.0;
    for (long long n = 1; n <= max_terms; ++n) {
        partial += g(n);
        partial_acc += partial;
        const double mean = partial_acc / static_cast<double>(n);
        if (n > 64 && std::abs(mean - prev_mean) <= 1e-12 * std::max(1.0, std::abs(mean))) {
            if (++quiet >= 16) {
                value = mean;
                stabilized = true;
                return;
            }
        } else {
            quiet = 0;
        }
        prev_mean = mean;
        value = mean;
        if (!std::isfinite(partial_acc)) return;
    }
}

// Neville polynomial extrapolation to s = 0 through the given nodes.
double neville_at_zero(const std::vector<double>& s, const std::vector<double>& f) {
    std::vector<double> p = f;
    const std::size_t n = s.size();
    for (std::size_t m = 1; m < n; ++m)
        for (std::size_t i = 0; i + m < n; ++i)
            p[i] = (s[i + m] * p[i] - s[i] * p[i + 1]) / (s[i + m] - s[i]);
    return p[0];
}

} // namespace

AbelSummary abel_sum(const TermGenerator& g, const AbelOptions& opts) {
    if (opts.r_grid.empty()) throw std::invalid_argument("abel_sum: empty radius grid");
    for (std::size_t i = 0; i < opts.r_grid.size(); ++i) {
        const double r = opts.r_grid[i];
        if (!(r > 0.0 && r < 1.0)) throw std::invalid_argument("abel_sum: radii must lie in (0,1)");
        if (i > 0 && !(r > opts.r_grid[i - 1]))
            throw std::invalid_argument("abel_sum: radius grid must be strictly increasing");
    }

    AbelSummary out;
    for (double r : opts.r_grid) {
        const TailSum t = sum_to_stagnation(g, r, opts.max_terms);
        out.radii.push_back({r, t.value, t.used, t.stabilized});
        if (!t.stabilized) out.any_divergent_radius = true;
    }

    const TailSum direct = sum_to_stagnation(g, 1.0, opts.max_terms);
    out.direct_sum = direct.stabilized;
    out.direct_value = direct.value;

    cesaro_mean(g, opts.max_terms, out.cesaro_value, out.cesaro_stabilized);

    if (opts.extrapolate) {
        // Degree-3 extrapolation in s = 1 - r through the last four radii.
        std::vector<double> s, f;
        const std::size_t take = std::min<std::size_t>(4, out.radii.size());
        for (std::size_t i = out.radii.size() - take; i < out.radii.size(); ++i) {
            s.push_back(1.0 - out.radii[i].r);
            f.push_back(out.radii[i].value);
        }
        out.extrapolated = neville_at_zero(s, f);
    } else {
        out.extrapolated = out.radii.back().value;
    }

    out.estimate = out.direct_sum ? out.direct_value : out.extrapolated;
    return out;
}

AbelSummary abel_sum(const TermGenerator& g, const std::vector<double>& r_grid, bool extrapolate) {
    AbelOptions opts;
    opts.r_grid = r_grid;
    opts.extrapolate = extrapolate;
    return abel_sum(g, opts);
}

RadiusEstimate radius_estimate(const TruncatedSeries<double>& a) {
    const int K = a.order();
    if (K < 8) throw std::invalid_argument("radius_estimate: order >= 8 required");

    // Nonzero coefficients, ignoring values at roundoff level of the tail.
    double tail_scale = 0.0;
    for (int k = K / 2; k <= K; ++k) tail_scale = std::max(tail_scale, std::abs(a[k]));
    if (tail_scale == 0.0) throw std::invalid_argument("radius_estimate: zero coefficient tail");
    const double floor = tail_scale * 1e-13;

    std::vector<int> idx;
    for (int k = 0; k <= K; ++k)
        if (std::abs(a[k]) > floor) idx.push_back(k);
    if (idx.size() < 5) throw std::invalid_argument("radius_estimate: too few nonzero coefficients");

    RadiusEstimate out;
    const int k_top = idx.back();
    out.root_estimate = std::pow(std::abs(a[k_top]), -1.0 / k_top);

    // Establish a uniform gap over the upper half of the nonzero indices.
    const std::size_t half = idx.size() / 2;
    int gap = idx[half + 1] - idx[half];
    bool uniform = gap >= 1 && gap <= 4;
    for (std::size_t i = half + 1; i + 1 < idx.size() && uniform; ++i)
        uniform = (idx[i + 1] - idx[i]) == gap;

    if (!uniform) {
        out.ratio_usable = false;
        out.gap = 0;
        out.ratio_estimate = out.root_estimate;
        out.estimate = out.root_estimate;
        out.disagreement = 0.0;
        return out;
    }
    out.gap = gap;

    // Gap-g ratios r_k = (|c_k| / |c_{k+g}|)^(1/g) approach R with an O(1/k)
    // bias from the algebraic prefactor of the coefficients; a linear fit in
    // 1/k removes it (Richardson step).
    std::vector<double> ks, ratios;
    for (std::size_t i = half; i + 1 < idx.size(); ++i) {
        const int k = idx[i];
        const int kn = idx[i + 1];
        ratios.push_back(std::pow(std::abs(a[k] / a[kn]), 1.0 / gap));
        ks.push_back(static_cast<double>(k));
    }
    if (ratios.size() >= 3) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(ratios.size()), 2);
        Eigen::VectorXd y(static_cast<Eigen::Index>(ratios.size()));
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            M(static_cast<Eigen::Index>(i), 0) = 1.0;
            M(static_cast<Eigen::Index>(i), 1) = 1.0 / ks[i];
            y(static_cast<Eigen::Index>(i)) = ratios[i];
        }
        const Eigen::Vector2d fit = M.colPivHouseholderQr().solve(y);
        out.ratio_estimate = fit(0);
    } else {
        out.ratio_estimate = ratios.back();
    }

    out.estimate = out.ratio_estimate;
    out.disagreement = std::abs(out.ratio_estimate - out.root_estimate) /
                       std::max(std::abs(out.ratio_estimate), std::abs(out.root_estimate));
    return out;
}

} // namespace pslab
