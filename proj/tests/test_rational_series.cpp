#include <doctest.h>

#include <random>

#include "pslab/rational.hpp"
#include "pslab/series.hpp"
#include "pslab/serialize.hpp"

using namespace pslab;

namespace {

TruncatedSeries<Rational> rs(std::initializer_list<long long> cs) {
    std::vector<Rational> v;
    for (long long c : cs) v.emplace_back(c);
    return TruncatedSeries<Rational>(std::move(v));
}

} // namespace

TEST_CASE("rational arithmetic normalizes and reduces") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(-3, -6) == Rational(1, 2));
    CHECK(Rational(3, -6) == Rational(-1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(2, 3) * Rational(9, 4)) == Rational(3, 2));
    CHECK((Rational(1, 2) / Rational(1, 8)) == Rational(4));
    CHECK(Rational(7, 3).str() == "7/3");
    CHECK(Rational(-14, 6).str() == "-7/3");
    CHECK(Rational::from_string("-7/3") == Rational(-7, 3));
    CHECK(Rational::from_string("42") == Rational(42));
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("rational overflow is detected, not wrapped") {
    // ~2^133; its square (~2^266) exceeds the 256-bit integer backend.
    const Rational big = Rational::from_string("17014118346046923173168730371588410572800");
    CHECK_NOTHROW(big * Rational(1000000));
    CHECK_THROWS_AS(big * big * big, std::overflow_error);
}

TEST_CASE("series product truncates to the smaller order") {
    // (1 + x)(1 - x) at K = 2
    const auto a = rs({1, 1, 0});
    const auto b = rs({1, -1, 0});
    const auto p = a * b;
    CHECK(p.order() == 2);
    CHECK(p[0] == Rational(1));
    CHECK(p[1] == Rational(0));
    CHECK(p[2] == Rational(-1));

    // telescoping: (sum x^k, K=3) * (1 - x) = 1
    const auto geo = stock::geometric<Rational>(3);
    const auto one = geo * rs({1, -1, 0, 0});
    CHECK(one[0] == Rational(1));
    CHECK(one[1] == Rational(0));
    CHECK(one[2] == Rational(0));
    CHECK(one[3] == Rational(0));

    const auto mixed = rs({1, 1}) * rs({1, 1, 1, 1});
    CHECK(mixed.order() == 1);
}

TEST_CASE("sin series squared matches the double-angle expansion") {
    // sin^2 = x^2 - x^4/3 + ...; oracle: term-by-term Cauchy square of the
    // exact sine coefficients.
    const auto s = stock::sin_series<Rational>(5);
    const auto sq = s * s;
    CHECK(sq[0] == Rational(0));
    CHECK(sq[1] == Rational(0));
    CHECK(sq[2] == Rational(1));
    CHECK(sq[3] == Rational(0));
    CHECK(sq[4] == Rational(-1, 3));
    CHECK(sq[5] == Rational(0));
}

TEST_CASE("series composition") {
    const auto x = TruncatedSeries<Rational>::identity(4);
    const auto inner = rs({0, 1, 1, 0});  // x + x^2, K = 3

    // outer = x composed with anything is that thing
    CHECK(series_compose(x, inner)[2] == Rational(1));

    // outer = x^2, inner = x + x^2 -> x^2 + 2x^3 (+ x^4 beyond K=3)
    const auto outer = rs({0, 0, 1, 0});
    const auto c = series_compose(outer, inner);
    CHECK(c.order() == 3);
    CHECK(c[0] == Rational(0));
    CHECK(c[1] == Rational(0));
    CHECK(c[2] == Rational(1));
    CHECK(c[3] == Rational(2));

    // compose with the identity on the other side
    CHECK(series_compose(inner, x.truncated(3))[2] == Rational(1));

    CHECK_THROWS_AS(series_compose(outer, rs({1, 1})), std::invalid_argument);
}

TEST_CASE("exp composed with log(1+x) is 1 + x") {
    const auto e = stock::exp_series<double>(6);
    const auto l = stock::log1p_series<double>(6);
    const auto c = series_compose(e, l);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-13));
    for (int k = 2; k <= 6; ++k) CHECK(std::abs(c[k]) < 1e-13);
}

TEST_CASE("series antiderivative inverts the derivative") {
    const auto s = rs({4, 0, 3, -2});
    const auto anti = series_antiderivative(s);
    CHECK(anti[0] == Rational(0));
    CHECK(anti[3] == Rational(1));
    CHECK(series_derivative(anti) == s);
}

TEST_CASE("series derivative") {
    // constant: K=1 with c1 = 0
    const auto c5 = rs({5, 0});
    const auto dc = series_derivative(c5);
    CHECK(dc.order() == 0);
    CHECK(dc[0] == Rational(0));

    // x^3 -> 3x^2
    const auto cube = rs({0, 0, 0, 1});
    const auto d = series_derivative(cube);
    CHECK(d.order() == 2);
    CHECK(d[2] == Rational(3));

    CHECK_THROWS_AS(series_derivative(rs({1})), std::invalid_argument);
}

TEST_CASE("catalan series derivative matches finite differences of the closed form") {
    // C(x) = (1 - sqrt(1-4x))/(2x) = 1 + x + 2x^2 + 5x^3 + 14x^4 + 42x^5
    const auto cat = rs({1, 1, 2, 5, 14, 42});
    const auto d = to_float(series_derivative(cat));
    const auto closed = [](double x) { return (1.0 - std::sqrt(1.0 - 4.0 * x)) / (2.0 * x); };
    const double x0 = 0.01, h = 1e-6;
    const double fd = (closed(x0 + h) - closed(x0 - h)) / (2.0 * h);
    CHECK(d(x0) == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("series product commutes and associates in exact mode") {
    const auto a = rs({1, 2, 3, 4});
    const auto b = rs({-2, 5, 0, 1});
    const auto c = rs({0, 1, 1, 7});
    CHECK((a * b) == (b * a));
    CHECK(((a * b) * c) == (a * (b * c)));
}

TEST_CASE("series JSON round trip keeps rationals as p/q strings") {
    const auto s = rs({1, -7, 0});
    const auto j = to_json(s);
    CHECK(j["mode"] == "exact");
    CHECK(j["order"] == 2);
    CHECK(j["coefficients"][1] == "-7");
    const auto back = exact_series_from_json(j);
    CHECK(back == s);

    const auto f = stock::geometric<double>(3, 0.5);
    const auto jf = to_json(f);
    CHECK(jf["mode"] == "float");
    const auto backf = float_series_from_json(jf);
    CHECK(backf[3] == doctest::Approx(0.125));
}

TEST_CASE("float-mode product commutes and associates to 1e-12 relative") {
    std::mt19937 rng(77u);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        auto draw = [&]() {
            auto s = TruncatedSeries<double>::zero(10);
            for (int k = 0; k <= 10; ++k) s[k] = coef(rng);
            return s;
        };
        const auto a = draw(), b = draw(), c = draw();
        const auto ab = a * b, ba = b * a;
        const auto abc = (a * b) * c, acb = a * (b * c);
        for (int k = 0; k <= 10; ++k) {
            CHECK(std::abs(ab[k] - ba[k]) <= 1e-12 * std::max(1.0, std::abs(ab[k])));
            CHECK(std::abs(abc[k] - acb[k]) <= 1e-12 * std::max(1.0, std::abs(abc[k])));
        }
    }
}

TEST_CASE("composition with the identity is the identity either way") {
    const auto s = rs({0, 3, -2, 5, 1});
    const auto x = TruncatedSeries<Rational>::identity(4);
    CHECK(series_compose(s, x) == s);
    CHECK(series_compose(x, s) == s);
}

TEST_CASE("series equality is exact in rational mode") {
    CHECK(rs({1, 2}) == rs({1, 2}));
    CHECK_FALSE(rs({1, 2}) == rs({1, 3}));
}
