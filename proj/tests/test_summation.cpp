#include <doctest.h>

#include <cmath>

#include "pslab/summation.hpp"

using namespace pslab;

TEST_CASE("abel sum of the cosine series is -1/2 away from x = 0") {
    for (double x : {M_PI / 3.0, M_PI / 2.0, 2.0 * M_PI / 3.0}) {
        const auto res = abel_sum([x](long long n) { return std::cos(n * x); });
        CHECK_FALSE(res.direct_sum);
        CHECK(res.estimate == doctest::Approx(-0.5).epsilon(1e-3));
    }
}

TEST_CASE("abel sum of the alternating unit series is 1/2") {
    const auto res = abel_sum([](long long n) { return n % 2 == 1 ? 1.0 : -1.0; });
    CHECK_FALSE(res.direct_sum);
    CHECK(std::abs(res.estimate - 0.5) < 1e-6);
    // Cesaro-1 diagnostic agrees for this series.
    CHECK(res.cesaro_value == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("convergent geometric series short-circuits to its direct sum") {
    // sum_{n>=0} 2^-n = 2 fed with the 1-based generator a_n = 2^{1-n}
    const auto res = abel_sum([](long long n) { return std::pow(2.0, 1.0 - static_cast<double>(n)); });
    CHECK(res.direct_sum);
    CHECK(res.estimate == doctest::Approx(2.0).epsilon(1e-12));
    // The pure Abel extrapolation is a consistency diagnostic here.
    CHECK(res.extrapolated == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("absolutely convergent series match their direct sum to 1e-9") {
    const auto res = abel_sum([](long long n) { return 1.0 / (static_cast<double>(n) * n * n); });
    const double zeta3 = 1.2020569031595942854;
    CHECK(res.direct_sum);
    CHECK(std::abs(res.estimate - zeta3) < 1e-9);
}

TEST_CASE("per-radius diagnostics are reported") {
    const auto res = abel_sum([](long long n) { return n % 2 == 1 ? 1.0 : -1.0; }, {0.5, 0.9}, true);
    REQUIRE(res.radii.size() == 2);
    CHECK(res.radii[0].r == 0.5);
    CHECK(res.radii[0].stabilized);
    CHECK(res.radii[0].value == doctest::Approx(0.5 / 1.5));  // r/(1+r)
}

TEST_CASE("abel grid validation") {
    CHECK_THROWS_AS(abel_sum([](long long) { return 0.0; }, {0.9, 0.5}, true), std::invalid_argument);
    CHECK_THROWS_AS(abel_sum([](long long) { return 0.0; }, {1.5}, true), std::invalid_argument);
    CHECK_THROWS_AS(abel_sum([](long long) { return 0.0; }, std::vector<double>{}, true), std::invalid_argument);
}

TEST_CASE("radius estimate on geometric coefficient tails") {
    // sum x^k -> radius 1
    CHECK(radius_estimate(stock::geometric<double>(20)).estimate == doctest::Approx(1.0).epsilon(0.02));
    // sum 2^k x^k -> radius 1/2
    CHECK(radius_estimate(stock::geometric<double>(20, 2.0)).estimate == doctest::Approx(0.5).epsilon(0.02));
    // sum c^k x^k -> 1/|c| within 2% for a spread of c
    for (double c : {0.3, 1.7, 4.0}) {
        const auto est = radius_estimate(stock::geometric<double>(24, c));
        CHECK(est.estimate == doctest::Approx(1.0 / c).epsilon(0.02));
        CHECK(est.ratio_usable);
        CHECK(est.gap == 1);
    }
}

TEST_CASE("radius estimate handles a parity-restricted (gap 2) series") {
    // sum x^(2j) = 1/(1-x^2): radius 1, only even coefficients
    auto s = TruncatedSeries<double>::zero(24);
    for (int k = 0; k <= 24; k += 2) s[k] = 1.0;
    const auto est = radius_estimate(s);
    CHECK(est.gap == 2);
    CHECK(est.ratio_usable);
    CHECK(est.estimate == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("radius estimate falls back to the root test on irregular gaps") {
    auto s = TruncatedSeries<double>::zero(24);
    s[0] = 1.0;
    for (int k : {1, 2, 3, 5, 8, 13, 21}) s[k] = std::pow(2.0, k);  // irregular support
    const auto est = radius_estimate(s);
    CHECK_FALSE(est.ratio_usable);
    CHECK(est.estimate == doctest::Approx(est.root_estimate));
}

TEST_CASE("radius estimate preconditions") {
    CHECK_THROWS_AS(radius_estimate(stock::geometric<double>(6)), std::invalid_argument);
    CHECK_THROWS_AS(radius_estimate(TruncatedSeries<double>::zero(20)), std::invalid_argument);
}
