#include "pslab/chain.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace pslab {

void ChainConfig::validate() const {
    if (segments < 2) throw std::invalid_argument("ChainConfig: m >= 2");
    if (!(length > 0.0)) throw std::invalid_argument("ChainConfig: a > 0");
    if (!(wave_speed > 0.0)) throw std::invalid_argument("ChainConfig: c > 0");
    if (!(pinning >= 0.0)) throw std::invalid_argument("ChainConfig: omega0 >= 0");
    if (!(density > 0.0)) throw std::invalid_argument("ChainConfig: mu > 0");
}

Profile Profile::zero() {
    return Profile{[](double) { return 0.0; }};
}

Profile Profile::sine(int k, double a) {
    return Profile{[k, a](double x) { return std::sin(k * M_PI * x / a); }};
}

Profile Profile::triangle(double peak_fraction, double a) {
    const double x0 = peak_fraction * a;
    return Profile{[x0, a](double x) {
        if (x <= 0.0 || x >= a) return 0.0;
        return x <= x0 ? x / x0 : (a - x) / (a - x0);
    }};
}

Profile Profile::bump(double center_fraction, double width_fraction, double a) {
    const double c = center_fraction * a;
    const double w = width_fraction * a;
    const double g0 = std::exp(-(c * c) / (w * w));
    const double ga = std::exp(-((a - c) * (a - c)) / (w * w));
    // Gaussian minus the line through its endpoint values, so the datum
    // vanishes exactly at 0 and a.
    return Profile{[c, w, a, g0, ga](double x) {
        return std::exp(-((x - c) * (x - c)) / (w * w)) - (g0 + (ga - g0) * x / a);
    }};
}

Profile make_named_profile(const std::string& spec, double a) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (name == "zero") return Profile::zero();
    if (name == "sine") {
        const int k = args.empty() ? 1 : std::stoi(args);
        if (k < 1) throw std::invalid_argument("profile sine:k needs k >= 1");
        return Profile::sine(k, a);
    }
    if (name == "triangle") {
        const double x0 = args.empty() ? 0.5 : std::stod(args);
        if (!(x0 > 0.0 && x0 < 1.0)) throw std::invalid_argument("profile triangle:x0 needs 0 < x0 < 1");
        return Profile::triangle(x0, a);
    }
    if (name == "bump") {
        double c = 0.5, w = 0.1;
        if (!args.empty()) {
            const auto comma = args.find(',');
            c = std::stod(args.substr(0, comma));
            if (comma != std::string::npos) w = std::stod(args.substr(comma + 1));
        }
        if (!(c > 0.0 && c < 1.0 && w > 0.0)) throw std::invalid_argument("profile bump:c,w out of range");
        return Profile::bump(c, w, a);
    }
    throw std::invalid_argument("unknown profile '" + spec + "' (zero | sine:k | triangle:x0 | bump:c,w)");
}

double closed_form_frequency(const ChainConfig& cfg, int h) {
    cfg.validate();
    const double d = cfg.delta();
    // 2(1-cos t)/d^2 written as (2 sin(t/2)/d)^2.
    double s;
    if (cfg.boundary == Boundary::dirichlet) {
        if (h < 1 || h > cfg.segments - 1) throw std::invalid_argument("closed_form_frequency: 1 <= h <= m-1");
        s = 2.0 * cfg.wave_speed / d * std::sin(M_PI * h * d / (2.0 * cfg.length));
    } else {
        s = 2.0 * cfg.wave_speed / d * std::sin(M_PI * h / cfg.segments);
    }
    return std::sqrt(s * s + cfg.pinning * cfg.pinning);
}

std::vector<Mode> normal_modes(const ChainConfig& cfg) {
    cfg.validate();
    if (cfg.boundary != Boundary::dirichlet)
        throw std::invalid_argument("normal_modes: sine basis is Dirichlet-only; use tridiagonal_frequencies for periodic");
    const int m = cfg.segments;
    std::vector<Mode> modes;
    modes.reserve(static_cast<std::size_t>(m - 1));
    const double norm = std::sqrt(2.0 / m);
    for (int h = 1; h <= m - 1; ++h) {
        Mode mode;
        mode.omega = closed_form_frequency(cfg, h);
        mode.shape.resize(m - 1);
        for (int i = 1; i <= m - 1; ++i) mode.shape[i - 1] = norm * std::sin(M_PI * h * i / static_cast<double>(m));
        modes.push_back(std::move(mode));
    }
    return modes;
}

Eigen::VectorXd tridiagonal_frequencies(const ChainConfig& cfg) {
    cfg.validate();
    const double d = cfg.delta();
    const double k = cfg.wave_speed * cfg.wave_speed / (d * d);
    const double w0sq = cfg.pinning * cfg.pinning;
    const int n = cfg.mode_count();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        A(i, i) = 2.0 * k + w0sq;
        if (i + 1 < n) {
            A(i, i + 1) = -k;
            A(i + 1, i) = -k;
        }
    }
    if (cfg.boundary == Boundary::periodic) {
        A(0, n - 1) += -k;
        A(n - 1, 0) += -k;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A, Eigen::EigenvaluesOnly);
    Eigen::VectorXd omegas = solver.eigenvalues();
    for (int i = 0; i < n; ++i) omegas[i] = std::sqrt(std::max(0.0, omegas[i]));
    return omegas;
}

namespace {

void check_dirichlet_datum(const Profile& Z, const ChainConfig& cfg, const char* what) {
    const double z0 = Z(0.0), za = Z(cfg.length);
    double scale = 1.0;
    for (int i = 1; i < 8; ++i) scale = std::max(scale, std::abs(Z(cfg.length * i / 8.0)));
    if (std::abs(z0) > 1e-12 * scale || std::abs(za) > 1e-12 * scale)
        throw std::invalid_argument(std::string(what) + ": Dirichlet datum must vanish at both endpoints");
}

} // namespace

ModalDecomposition project_initial_data(const Profile& Z, const Profile& U, const ChainConfig& cfg) {
    cfg.validate();
    if (cfg.boundary != Boundary::dirichlet)
        throw std::invalid_argument("project_initial_data: Dirichlet mode only");
    check_dirichlet_datum(Z, cfg, "project_initial_data");
    const int m = cfg.segments;
    const double d = cfg.delta();
    const double norm = std::sqrt(2.0 / m);

    Eigen::VectorXd zs(m - 1), us(m - 1);
    for (int i = 1; i <= m - 1; ++i) {
        zs[i - 1] = Z(i * d);
        us[i - 1] = U(i * d);
    }

    ModalDecomposition dec;
    dec.cos_amp.resize(m - 1);
    dec.sin_amp.resize(m - 1);
    dec.frequency.resize(m - 1);
    for (int h = 1; h <= m - 1; ++h) {
        double az = 0.0, au = 0.0;
        for (int i = 1; i <= m - 1; ++i) {
            const double e = norm * std::sin(M_PI * h * i / static_cast<double>(m));
            az += e * zs[i - 1];
            au += e * us[i - 1];
        }
        const double omega = closed_form_frequency(cfg, h);
        dec.cos_amp[h - 1] = az;
        dec.sin_amp[h - 1] = au / omega;
        dec.frequency[h - 1] = omega;
    }
    return dec;
}

ChainState evolve_modal(const ModalDecomposition& dec, const ChainConfig& cfg, double t) {
    cfg.validate();
    const int m = cfg.segments;
    const double norm = std::sqrt(2.0 / m);
    ChainState s;
    s.displacement = Eigen::VectorXd::Zero(m + 1);
    s.velocity = Eigen::VectorXd::Zero(m + 1);
    s.time = t;
    for (int h = 1; h <= m - 1; ++h) {
        const double w = dec.frequency[h - 1];
        const double amp = dec.cos_amp[h - 1] * std::cos(w * t) + dec.sin_amp[h - 1] * std::sin(w * t);
        const double vel = w * (-dec.cos_amp[h - 1] * std::sin(w * t) + dec.sin_amp[h - 1] * std::cos(w * t));
        for (int i = 1; i <= m - 1; ++i) {
            const double e = norm * std::sin(M_PI * h * i / static_cast<double>(m));
            s.displacement[i] += e * amp;
            s.velocity[i] += e * vel;
        }
    }
    return s;
}

double evolve_modal_at(const ModalDecomposition& dec, const ChainConfig& cfg, double t, double x) {
    const int m = cfg.segments;
    const double norm = std::sqrt(2.0 / m);
    double y = 0.0;
    for (int h = 1; h <= m - 1; ++h) {
        const double w = dec.frequency[h - 1];
        const double amp = dec.cos_amp[h - 1] * std::cos(w * t) + dec.sin_amp[h - 1] * std::sin(w * t);
        y += norm * std::sin(M_PI * h * x / cfg.length) * amp;
    }
    return y;
}

ChainState sample_state(const Profile& Z, const Profile& U, const ChainConfig& cfg) {
    cfg.validate();
    const int sites = cfg.boundary == Boundary::dirichlet ? cfg.segments + 1 : cfg.segments;
    ChainState s;
    s.displacement.resize(sites);
    s.velocity.resize(sites);
    for (int i = 0; i < sites; ++i) {
        s.displacement[i] = Z(i * cfg.delta());
        s.velocity[i] = U(i * cfg.delta());
    }
    if (cfg.boundary == Boundary::dirichlet) {
        s.displacement[0] = s.displacement[cfg.segments] = 0.0;
        s.velocity[0] = s.velocity[cfg.segments] = 0.0;
    }
    return s;
}

double chain_energy(const ChainState& s, const ChainConfig& cfg) {
    cfg.validate();
    const int m = cfg.segments;
    const double d = cfg.delta();
    const double c2 = cfg.wave_speed * cfg.wave_speed;
    const double w0sq = cfg.pinning * cfg.pinning;
    double e = 0.0;
    if (cfg.boundary == Boundary::dirichlet) {
        for (int i = 1; i <= m - 1; ++i)
            e += s.velocity[i] * s.velocity[i] + w0sq * s.displacement[i] * s.displacement[i];
        for (int i = 0; i <= m - 1; ++i) {
            const double g = (s.displacement[i + 1] - s.displacement[i]) / d;
            e += c2 * g * g;
        }
    } else {
        for (int i = 0; i < m; ++i) {
            const double g = (s.displacement[(i + 1) % m] - s.displacement[i]) / d;
            e += s.velocity[i] * s.velocity[i] + w0sq * s.displacement[i] * s.displacement[i] + c2 * g * g;
        }
    }
    return 0.5 * cfg.density * d * e;
}

namespace {

void accelerations(const ChainState& s, const ChainConfig& cfg, Eigen::VectorXd& acc) {
    const int m = cfg.segments;
    const double d = cfg.delta();
    const double k = cfg.wave_speed * cfg.wave_speed / (d * d);
    const double w0sq = cfg.pinning * cfg.pinning;
    if (cfg.boundary == Boundary::dirichlet) {
        acc.setZero(m + 1);
        for (int i = 1; i <= m - 1; ++i)
            acc[i] = k * (s.displacement[i + 1] - 2.0 * s.displacement[i] + s.displacement[i - 1]) -
                     w0sq * s.displacement[i];
    } else {
        acc.setZero(m);
        for (int i = 0; i < m; ++i)
            acc[i] = k * (s.displacement[(i + 1) % m] - 2.0 * s.displacement[i] + s.displacement[(i + m - 1) % m]) -
                     w0sq * s.displacement[i];
    }
}

} // namespace

ChainState evolve_verlet(const ChainState& s0, const ChainConfig& cfg, double dt, long long steps) {
    cfg.validate();
    const double omega_max = std::sqrt(std::pow(2.0 * cfg.wave_speed / cfg.delta(), 2) + cfg.pinning * cfg.pinning);
    if (!(dt > 0.0) || dt * omega_max >= 2.0)
        throw std::invalid_argument("evolve_verlet: stability requires dt * omega_max < 2");

    ChainState s = s0;
    const double e0 = chain_energy(s, cfg);
    Eigen::VectorXd acc;
    accelerations(s, cfg, acc);
    const long long check_every = std::max<long long>(1, steps / 64);
    for (long long n = 0; n < steps; ++n) {
        s.velocity += 0.5 * dt * acc;
        s.displacement += dt * s.velocity;
        accelerations(s, cfg, acc);
        s.velocity += 0.5 * dt * acc;
        s.time += dt;
        if (e0 > 0.0 && (n + 1) % check_every == 0) {
            const double e = chain_energy(s, cfg);
            if (std::abs(e - e0) > 0.01 * e0)
                throw std::runtime_error("evolve_verlet: energy drift above 1%; reduce dt below 2/omega_max");
        }
    }
    return s;
}

namespace {

// Trapezoid value on 2^level * base_panels panels, reusing the previous
// level's sum; Simpson value by Richardson of consecutive levels.
class AdaptiveSimpson {
public:
    AdaptiveSimpson(std::function<double(double)> f, double a, double b, int base_panels)
        : f_(std::move(f)), a_(a), b_(b), n_(base_panels) {
        double sum = 0.5 * (f_(a_) + f_(b_));
        const double h = (b_ - a_) / n_;
        for (int i = 1; i < n_; ++i) sum += f_(a_ + i * h);
        trap_ = sum * h;
    }

    // One panel doubling; returns the new Simpson estimate.
    double refine() {
        const double h = (b_ - a_) / (2.0 * n_);
        double add = 0.0;
        for (int i = 0; i < n_; ++i) add += f_(a_ + (2 * i + 1) * h);
        const double trap_new = 0.5 * trap_ + add * h;
        simpson_ = (4.0 * trap_new - trap_) / 3.0;
        trap_ = trap_new;
        n_ *= 2;
        return simpson_;
    }

    int panels() const { return n_; }

private:
    std::function<double(double)> f_;
    double a_, b_;
    int n_;
    double trap_ = 0.0;
    double simpson_ = 0.0;
};

double integrate_to_stagnation(const std::function<double(double)>& f, double a, double b) {
    AdaptiveSimpson q(f, a, b, 4096);
    double prev = q.refine();
    for (int level = 0; level < 8; ++level) {
        const double cur = q.refine();
        if (std::abs(cur - prev) < 1e-10) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace

ContinuumSolution::ContinuumSolution(const Profile& Z, const Profile& U, const ChainConfig& cfg, int mode_cutoff) {
    cfg.validate();
    if (mode_cutoff < 1) throw std::invalid_argument("ContinuumSolution: mode cutoff >= 1");
    check_dirichlet_datum(Z, cfg, "continuum_solution");
    a_ = cfg.length;
    c_ = cfg.wave_speed;
    z_coef_.resize(static_cast<std::size_t>(mode_cutoff));
    u_coef_.resize(static_cast<std::size_t>(mode_cutoff));
    for (int h = 1; h <= mode_cutoff; ++h) {
        const double w = M_PI * h / a_;
        z_coef_[static_cast<std::size_t>(h - 1)] =
            (2.0 / a_) * integrate_to_stagnation([&](double x) { return Z(x) * std::sin(w * x); }, 0.0, a_);
        u_coef_[static_cast<std::size_t>(h - 1)] =
            (2.0 / a_) * integrate_to_stagnation([&](double x) { return U(x) * std::sin(w * x); }, 0.0, a_);
    }
}

double ContinuumSolution::operator()(double x, double t) const {
    double u = 0.0;
    for (std::size_t h = 1; h <= z_coef_.size(); ++h) {
        const double wbar = c_ * M_PI * static_cast<double>(h) / a_;
        const double sx = std::sin(M_PI * static_cast<double>(h) * x / a_);
        u += sx * (z_coef_[h - 1] * std::cos(wbar * t) + u_coef_[h - 1] * std::sin(wbar * t) / wbar);
    }
    return u;
}

double continuum_solution(const Profile& Z, const Profile& U, const ChainConfig& cfg,
                          double x, double t, int mode_cutoff) {
    return ContinuumSolution(Z, U, cfg, mode_cutoff)(x, t);
}

double dalembert_solution(const Profile& phi, const ChainConfig& cfg, double x, double t) {
    cfg.validate();
    check_dirichlet_datum(phi, cfg, "dalembert_solution");
    const double a = cfg.length;
    const auto odd_extension = [&](double xi) {
        double r = std::fmod(xi, 2.0 * a);
        if (r < -a) r += 2.0 * a;
        if (r >= a) r -= 2.0 * a;
        return r >= 0.0 ? phi(r) : -phi(-r);
    };
    // phi(x-ct) + phi(x+ct) equals twice the datum at t = 0; the half
    // makes the two solution routes directly comparable.
    return 0.5 * (odd_extension(x - cfg.wave_speed * t) + odd_extension(x + cfg.wave_speed * t));
}

ConvergenceStudy convergence_study(const Profile& Z, const Profile& U, const std::vector<int>& meshes,
                                   double t, const std::vector<double>& grid, const ChainConfig& base_cfg,
                                   int continuum_modes) {
    if (meshes.empty()) throw std::invalid_argument("convergence_study: need at least one mesh");
    for (std::size_t i = 1; i < meshes.size(); ++i)
        if (meshes[i] <= meshes[i - 1]) throw std::invalid_argument("convergence_study: meshes must increase");

    ConvergenceStudy out;
    const ContinuumSolution exact(Z, U, base_cfg, continuum_modes);
    for (int m : meshes) {
        ChainConfig cfg = base_cfg;
        cfg.segments = m;
        const auto dec = project_initial_data(Z, U, cfg);
        double err = 0.0;
        for (double x : grid)
            err = std::max(err, std::abs(evolve_modal_at(dec, cfg, t, x) - exact(x, t)));
        out.meshes.push_back(m);
        out.deltas.push_back(cfg.delta());
        out.sup_errors.push_back(err);
    }

    double max_err = 0.0;
    for (double e : out.sup_errors) max_err = std::max(max_err, e);
    if (max_err == 0.0) {
        out.all_zero = true;
        out.fitted_order = 0.0;
        return out;
    }

    Eigen::MatrixXd M(static_cast<Eigen::Index>(out.meshes.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(out.meshes.size()));
    for (std::size_t i = 0; i < out.meshes.size(); ++i) {
        M(static_cast<Eigen::Index>(i), 0) = 1.0;
        M(static_cast<Eigen::Index>(i), 1) = std::log(out.deltas[i]);
        y(static_cast<Eigen::Index>(i)) = std::log(std::max(out.sup_errors[i], 1e-300));
    }
    out.fitted_order = M.colPivHouseholderQr().solve(y)(1);
    return out;
}

} // namespace pslab
