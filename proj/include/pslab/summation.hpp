#pragma once

#include <functional>
#include <vector>

#include "pslab/series.hpp"

namespace pslab {

// Rule producing the n-th term of a numeric series, n = 1, 2, ...
// Implementations must be deterministic in n.
using TermGenerator = std::function<double(long long)>;

struct AbelRadiusValue {
    double r = 0.0;
    double value = 0.0;       // sum a_n r^n, summed to machine stagnation
    long long terms_used = 0;
    bool stabilized = false;  // false -> flagged divergent-at-r
};

struct AbelSummary {
    double estimate = 0.0;            // best available limit (see flags)
    double extrapolated = 0.0;        // polynomial extrapolation of the Abel values at r -> 1
    std::vector<AbelRadiusValue> radii;
    bool direct_sum = false;          // raw series converged at r = 1; estimate is that sum
    double direct_value = 0.0;
    double cesaro_value = 0.0;        // order-1 Cesaro mean of the partial sums (diagnostic)
    bool cesaro_stabilized = false;
    bool any_divergent_radius = false;
};

struct AbelOptions {
    // Grid default reproduces the cos-series value to 1e-3 without
    // arbitrary-precision machinery.
    std::vector<double> r_grid{0.9, 0.95, 0.98, 0.99, 0.995};
    bool extrapolate = true;
    long long max_terms = 2'000'000;
};

// Abel summation lim_{r->1^-} sum_{n>=1} a_n r^n. Per-radius sums run to
// machine stagnation; the limit is a degree-3 polynomial extrapolation in
// (1-r) through the last grid points. If the raw series itself converges
// at r = 1 the direct sum is returned as the estimate (and flagged).
AbelSummary abel_sum(const TermGenerator& g, const AbelOptions& opts = {});
AbelSummary abel_sum(const TermGenerator& g, const std::vector<double>& r_grid, bool extrapolate);

struct RadiusEstimate {
    double estimate = 0.0;       // preferred: extrapolated ratio test, else root test
    double ratio_estimate = 0.0; // gap-aware ratio test, Richardson-extrapolated in 1/k
    double root_estimate = 0.0;  // |c_k|^(-1/k) at the top order
    double disagreement = 0.0;   // |ratio - root| / max(ratio, root)
    bool ratio_usable = true;    // false -> irregular zero pattern, root test only
    int gap = 1;                 // uniform index gap between nonzero coefficients
};

// Convergence-radius estimate from the tail of the coefficient list.
// Requires K >= 8 and a nonzero tail. Interleaved zero coefficients with a
// uniform gap (parity-restricted series) are handled by gap-g ratios;
// irregular gaps fall back to the root test, flagged.
RadiusEstimate radius_estimate(const TruncatedSeries<double>& a);

} // namespace pslab
