#include <doctest.h>

#include <cmath>

#include "pslab/chain.hpp"

using namespace pslab;

namespace {

ChainConfig cfg_of(int m, double omega0 = 0.0) {
    ChainConfig c;
    c.segments = m;
    c.pinning = omega0;
    return c;
}

} // namespace

TEST_CASE("closed-form frequencies match the literal eigenvalue cases") {
    // m = 2: single mode, omega^2 = 2 c^2 / delta^2
    const auto c2 = cfg_of(2);
    CHECK(closed_form_frequency(c2, 1) == doctest::Approx(std::sqrt(2.0) / c2.delta()));

    // m = 3: omega_h^2 = (c/delta)^2 {1, 3} (eigenvalues of [2,-1;-1,2])
    const auto c3 = cfg_of(3);
    const double base = 1.0 / c3.delta();
    CHECK(closed_form_frequency(c3, 1) == doctest::Approx(base * 1.0));
    CHECK(closed_form_frequency(c3, 2) == doctest::Approx(base * std::sqrt(3.0)));
}

TEST_CASE("closed-form spectrum equals the tridiagonal eigensolve to 1e-12 relative") {
    for (int m : {8, 32, 128}) {
        for (double w0 : {0.0, 2.5}) {
            const auto cfg = cfg_of(m, w0);
            const auto brute = tridiagonal_frequencies(cfg);
            for (int h = 1; h <= m - 1; ++h) {
                const double closed = closed_form_frequency(cfg, h);
                CHECK(std::abs(brute[h - 1] - closed) <= 1e-12 * closed);
            }
        }
    }
}

TEST_CASE("fixed mode frequency approaches c pi h / a at rate delta^2") {
    const double a = 1.0, c = 1.0;
    for (int h : {1, 2, 3}) {
        const double limit = c * M_PI * h / a;
        double prev_gap = -1.0;
        for (int m : {16, 32, 64, 128}) {
            const auto cfg = cfg_of(m);
            const double gap = std::abs(closed_form_frequency(cfg, h) - limit);
            const double bound = c * std::pow(M_PI * h, 3) / (24.0 * a * a * a) * cfg.delta() * cfg.delta() * 1.1;
            CHECK(gap <= bound);
            if (prev_gap > 0.0) CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }
}

TEST_CASE("projection reproduces sampled data (discrete completeness)") {
    const auto cfg = cfg_of(24);
    const auto Z = Profile::bump(0.4, 0.15, cfg.length);
    const auto U = Profile::sine(2, cfg.length);
    const auto dec = project_initial_data(Z, U, cfg);
    const auto s0 = evolve_modal(dec, cfg, 0.0);
    for (int i = 0; i <= cfg.segments; ++i) {
        const double x = i * cfg.delta();
        const double zi = (i == 0 || i == cfg.segments) ? 0.0 : Z(x);
        const double ui = (i == 0 || i == cfg.segments) ? 0.0 : U(x);
        CHECK(s0.displacement[i] == doctest::Approx(zi).epsilon(1e-10));
        CHECK(s0.velocity[i] == doctest::Approx(ui).epsilon(1e-10));
    }
}

TEST_CASE("projection picks out single modes") {
    const auto cfg = cfg_of(16);
    // Z = sin(pi x / a): only h = 1, amplitude sqrt(m/2)
    const auto dec = project_initial_data(Profile::sine(1, cfg.length), Profile::zero(), cfg);
    CHECK(dec.cos_amp[0] == doctest::Approx(std::sqrt(cfg.segments / 2.0)));
    for (int h = 2; h <= cfg.segments - 1; ++h) CHECK(std::abs(dec.cos_amp[h - 1]) < 1e-12);
    for (int h = 1; h <= cfg.segments - 1; ++h) CHECK(std::abs(dec.sin_amp[h - 1]) < 1e-12);

    // U = sin(2 pi x / a): only B_2 = sqrt(m/2)/omega_2
    const auto dec2 = project_initial_data(Profile::zero(), Profile::sine(2, cfg.length), cfg);
    CHECK(dec2.sin_amp[1] == doctest::Approx(std::sqrt(cfg.segments / 2.0) / closed_form_frequency(cfg, 2)));
    for (int h = 1; h <= cfg.segments - 1; ++h) {
        CHECK(std::abs(dec2.cos_amp[h - 1]) < 1e-12);
        if (h != 2) CHECK(std::abs(dec2.sin_amp[h - 1]) < 1e-12);
    }

    // rest state
    const auto dec0 = project_initial_data(Profile::zero(), Profile::zero(), cfg);
    CHECK(dec0.cos_amp.cwiseAbs().maxCoeff() == 0.0);
    CHECK(dec0.sin_amp.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection rejects non-vanishing Dirichlet data") {
    const auto cfg = cfg_of(8);
    Profile bad{[](double) { return 1.0; }};
    CHECK_THROWS_AS(project_initial_data(bad, Profile::zero(), cfg), std::invalid_argument);
}

TEST_CASE("modal evolution is periodic, reversible, and conserves energy") {
    const auto cfg = cfg_of(12);
    const auto Z = Profile::bump(0.5, 0.12, cfg.length);
    const auto dec = project_initial_data(Z, Profile::sine(1, cfg.length), cfg);

    // single mode returns after its own period
    const auto dec1 = project_initial_data(Profile::sine(1, cfg.length), Profile::zero(), cfg);
    const double T1 = 2.0 * M_PI / dec1.frequency[0];
    const auto s1 = evolve_modal(dec1, cfg, T1);
    const auto s1b = evolve_modal(dec1, cfg, 0.0);
    for (int i = 0; i <= cfg.segments; ++i)
        CHECK(s1.displacement[i] == doctest::Approx(s1b.displacement[i]).epsilon(1e-10));

    // energy conservation along the flow
    const double e0 = chain_energy(evolve_modal(dec, cfg, 0.0), cfg);
    for (double t : {0.17, 0.53, 2.9}) {
        const double e = chain_energy(evolve_modal(dec, cfg, t), cfg);
        CHECK(std::abs(e - e0) <= 1e-12 * e0);
    }
}

TEST_CASE("verlet integration tracks the exact modal flow") {
    const auto cfg = cfg_of(3);
    const auto Z = Profile{[&](double x) { return 0.4 * std::sin(M_PI * x) + 0.1 * std::sin(2.0 * M_PI * x); }};
    const auto U = Profile{[&](double x) { return 0.2 * std::sin(M_PI * x); }};
    const auto dec = project_initial_data(Z, U, cfg);

    const double t = 0.37;
    const double dt = 1e-5;
    const auto exact = evolve_modal(dec, cfg, t);
    const auto stepped = evolve_verlet(sample_state(Z, U, cfg), cfg, dt, static_cast<long long>(t / dt));
    for (int i = 0; i <= cfg.segments; ++i)
        CHECK(std::abs(stepped.displacement[i] - exact.displacement[i]) <= 1e-8);

    // zero state stays zero
    const auto z = evolve_verlet(sample_state(Profile::zero(), Profile::zero(), cfg), cfg, 1e-3, 1000);
    CHECK(z.displacement.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("verlet error scales as dt^2") {
    const auto cfg = cfg_of(4);
    const auto Z = Profile::sine(1, cfg.length);
    const auto dec = project_initial_data(Z, Profile::zero(), cfg);
    const double t = 0.5;
    const auto exact = evolve_modal(dec, cfg, t);

    std::vector<double> dts{2e-4, 1e-4, 5e-5};
    std::vector<double> errs;
    for (double dt : dts) {
        const auto s = evolve_verlet(sample_state(Z, Profile::zero(), cfg), cfg, dt, static_cast<long long>(std::llround(t / dt)));
        double err = 0.0;
        for (int i = 0; i <= cfg.segments; ++i) err = std::max(err, std::abs(s.displacement[i] - exact.displacement[i]));
        errs.push_back(err);
    }
    const double slope = std::log(errs[0] / errs[2]) / std::log(dts[0] / dts[2]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("verlet energy drift stays small over a long run") {
    const auto cfg = cfg_of(8);
    const auto Z = Profile::bump(0.5, 0.15, cfg.length);
    const auto s0 = sample_state(Z, Profile::zero(), cfg);
    const double e0 = chain_energy(s0, cfg);
    const double omega1 = closed_form_frequency(cfg, 1);
    const double horizon = 100.0 / omega1;
    const double dt = 5e-5 / omega1;
    const auto s = evolve_verlet(s0, cfg, dt, static_cast<long long>(horizon / dt));
    CHECK(std::abs(chain_energy(s, cfg) - e0) <= 1e-8 * e0);
}

TEST_CASE("pinned chain shifts the frequency to sqrt(omega1^2 + omega0^2)") {
    const double w0 = 3.0;
    const auto cfg = cfg_of(2, w0);
    const auto cfg_free = cfg_of(2);
    const double shifted = closed_form_frequency(cfg, 1);
    const double free = closed_form_frequency(cfg_free, 1);
    CHECK(shifted == doctest::Approx(std::sqrt(free * free + w0 * w0)));

    // measure the period from zero crossings of the single-mode verlet run
    const auto Z = Profile::sine(1, cfg.length);
    auto s = sample_state(Z, Profile::zero(), cfg);
    const double dt = 1e-5;
    double prev = s.displacement[1];
    double first_crossing = -1.0;
    for (int n = 1; n < 2000000; ++n) {
        s = evolve_verlet(s, cfg, dt, 1);
        const double cur = s.displacement[1];
        if (prev > 0.0 && cur <= 0.0) {
            first_crossing = s.time;
            break;
        }
        prev = cur;
    }
    REQUIRE(first_crossing > 0.0);
    // first zero of cos(w t) at t = pi / (2 w)... half period is pi / w
    CHECK(first_crossing == doctest::Approx(0.5 * M_PI / shifted).epsilon(1e-3));
}

TEST_CASE("verlet rejects unstable steps") {
    const auto cfg = cfg_of(64);
    const auto s = sample_state(Profile::sine(1, cfg.length), Profile::zero(), cfg);
    CHECK_THROWS_AS(evolve_verlet(s, cfg, 1.0, 10), std::invalid_argument);

    // just inside the linear stability bound the top mode oscillates with
    // > 1% energy error: the drift guard raises, citing the dt bound
    const auto cfg16 = cfg_of(16);
    const double omega_max = 2.0 * cfg16.wave_speed / cfg16.delta();
    const auto top = sample_state(Profile::sine(15, cfg16.length), Profile::zero(), cfg16);
    CHECK_THROWS_AS(evolve_verlet(top, cfg16, 1.95 / omega_max, 20000), std::runtime_error);
}

TEST_CASE("mode frequencies increase strictly in h for the free chain") {
    const auto cfg = cfg_of(24);
    const auto modes = normal_modes(cfg);
    for (std::size_t h = 1; h < modes.size(); ++h) CHECK(modes[h].omega > modes[h - 1].omega);
}

TEST_CASE("continuum solution: single-mode data evolve by one cosine factor") {
    const auto cfg = cfg_of(16);
    const ContinuumSolution sol(Profile::sine(1, cfg.length), Profile::zero(), cfg, 8);
    for (double t : {0.0, 0.3, 1.4}) {
        for (double x : {0.25, 0.5, 0.8}) {
            const double expect = std::sin(M_PI * x) * std::cos(M_PI * t);
            CHECK(sol(x, t) == doctest::Approx(expect).epsilon(1e-9));
        }
    }

    // velocity datum: sin(2 pi x) sin(wbar2 t)/wbar2
    const ContinuumSolution sol2(Profile::zero(), Profile::sine(2, cfg.length), cfg, 8);
    const double wbar2 = 2.0 * M_PI;
    CHECK(sol2(0.3, 0.7) == doctest::Approx(std::sin(2.0 * M_PI * 0.3) * std::sin(wbar2 * 0.7) / wbar2).epsilon(1e-9));
}

TEST_CASE("continuum solution tail is negligible for a smooth bump") {
    const auto cfg = cfg_of(16);
    const auto Z = Profile::bump(0.5, 0.1, cfg.length);
    const ContinuumSolution s200(Z, Profile::zero(), cfg, 200);
    const ContinuumSolution s400(Z, Profile::zero(), cfg, 400);
    double diff = 0.0;
    for (int i = 0; i <= 64; ++i) {
        const double x = i / 64.0;
        diff = std::max(diff, std::abs(s200(x, 0.4) - s400(x, 0.4)));
    }
    CHECK(diff <= 1e-6);
}

TEST_CASE("d'Alembert route equals the datum at t=0 and respects oddness") {
    const auto cfg = cfg_of(16);
    Profile bad{[](double) { return 1.0; }};
    CHECK_THROWS_AS(dalembert_solution(bad, cfg, 0.5, 0.1), std::invalid_argument);
    const auto Z = Profile::bump(0.35, 0.1, cfg.length);
    for (double x : {0.1, 0.35, 0.77}) CHECK(dalembert_solution(Z, cfg, x, 0.0) == doctest::Approx(Z(x)));
    for (double t : {0.13, 0.49, 2.2}) {
        CHECK(dalembert_solution(Z, cfg, 0.0, t) == doctest::Approx(0.0));
        CHECK(dalembert_solution(Z, cfg, cfg.length, t) == doctest::Approx(0.0));
    }
    // sine datum: product formula sin(pi x) cos(pi c t)
    const auto S = Profile::sine(1, cfg.length);
    for (double t : {0.21, 0.9})
        CHECK(dalembert_solution(S, cfg, 0.31, t) == doctest::Approx(std::sin(M_PI * 0.31) * std::cos(M_PI * t)).epsilon(1e-12));
}

TEST_CASE("d'Alembert equals the continuum mode sum for C2 data") {
    const auto cfg = cfg_of(16);
    const auto Z = Profile::bump(0.5, 0.1, cfg.length);
    const ContinuumSolution sol(Z, Profile::zero(), cfg, 400);
    for (double t : {0.3, 0.7}) {
        double diff = 0.0;
        for (int i = 0; i <= 256; ++i) {
            const double x = i / 256.0;
            diff = std::max(diff, std::abs(sol(x, t) - dalembert_solution(Z, cfg, x, t)));
        }
        CHECK(diff <= 1e-6);
    }
}

TEST_CASE("mesh convergence of the discrete modal solution is second order") {
    const auto cfg = cfg_of(16);
    const auto Z = Profile::bump(0.5, 0.12, cfg.length);
    std::vector<double> grid;
    for (int i = 0; i <= 128; ++i) grid.push_back(i / 128.0);
    const auto study = convergence_study(Z, Profile::zero(), {32, 64, 128, 256}, 0.4, grid, cfg, 400);
    REQUIRE(study.sup_errors.size() == 4);
    for (std::size_t i = 1; i < study.sup_errors.size(); ++i) CHECK(study.sup_errors[i] < study.sup_errors[i - 1]);
    CHECK(study.fitted_order == doctest::Approx(2.0).epsilon(0.1));

    // zero datum: all errors identically zero, flagged
    const auto zero_study = convergence_study(Profile::zero(), Profile::zero(), {8, 16}, 0.4, grid, cfg, 16);
    CHECK(zero_study.all_zero);
    for (double e : zero_study.sup_errors) CHECK(e == 0.0);
}

TEST_CASE("triangle datum is accepted and reports a sub-2 rate") {
    const auto cfg = cfg_of(16);
    const auto Z = Profile::triangle(0.5, cfg.length);
    std::vector<double> grid;
    for (int i = 0; i <= 64; ++i) grid.push_back(i / 64.0);
    const auto study = convergence_study(Z, Profile::zero(), {32, 64, 128}, 0.4, grid, cfg, 2000);
    CHECK(study.fitted_order < 2.0);
    CHECK(study.fitted_order > 0.2);
}

TEST_CASE("profile catalog") {
    CHECK(make_named_profile("zero", 1.0)(0.3) == 0.0);
    CHECK(make_named_profile("sine:2", 1.0)(0.25) == doctest::Approx(1.0));
    CHECK(make_named_profile("triangle:0.5", 1.0)(0.5) == doctest::Approx(1.0));
    const auto b = make_named_profile("bump:0.5,0.1", 1.0);
    CHECK(b(0.0) == doctest::Approx(0.0));
    CHECK(b(1.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(make_named_profile("wiggle", 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_named_profile("sine:0", 1.0), std::invalid_argument);
}

TEST_CASE("config validation") {
    ChainConfig bad;
    bad.segments = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ChainConfig{};
    bad.wave_speed = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ChainConfig{};
    bad.pinning = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("periodic boundary: closed form matches the circulant eigensolve") {
    ChainConfig cfg;
    cfg.segments = 12;
    cfg.boundary = Boundary::periodic;
    const auto brute = tridiagonal_frequencies(cfg);
    // periodic spectrum: omega_q for q = 0..m-1 with q and m-q degenerate
    std::vector<double> closed;
    for (int q = 0; q < cfg.segments; ++q) closed.push_back(closed_form_frequency(cfg, q));
    std::sort(closed.begin(), closed.end());
    const double lam_max = closed.back() * closed.back();
    for (int i = 0; i < cfg.segments; ++i) {
        const double c2 = closed[static_cast<std::size_t>(i)] * closed[static_cast<std::size_t>(i)];
        CHECK(std::abs(brute[i] * brute[i] - c2) <= 1e-11 * lam_max);
    }
}
