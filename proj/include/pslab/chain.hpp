#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace pslab {

enum class Boundary { dirichlet, periodic };

// Geometry and physical constants of the discrete oscillator chain:
// length a, m segments (m-1 moving masses with Dirichlet ends), wave
// speed c, optional elastic pinning omega0, density mu (enters the
// energy only, default 1).
struct ChainConfig {
    double length = 1.0;
    int segments = 16;
    double wave_speed = 1.0;
    double pinning = 0.0;
    double density = 1.0;
    Boundary boundary = Boundary::dirichlet;

    double delta() const { return length / segments; }
    int mode_count() const { return boundary == Boundary::dirichlet ? segments - 1 : segments; }
    void validate() const;
};

// Displacements and velocities at the sites xi = i*delta, i = 0..m for
// Dirichlet (endpoints pinned to zero), i = 0..m-1 for periodic.
struct ChainState {
    Eigen::VectorXd displacement;
    Eigen::VectorXd velocity;
    double time = 0.0;
};

// Amplitude pairs (A_h, B_h) and frequencies of the normal modes,
// h = 1..m-1 in Dirichlet mode.
struct ModalDecomposition {
    Eigen::VectorXd cos_amp;
    Eigen::VectorXd sin_amp;
    Eigen::VectorXd frequency;
};

// Position or velocity datum on [0, length], sampled on demand.
struct Profile {
    std::function<double(double)> f;
    double operator()(double x) const { return f(x); }

    static Profile zero();
    static Profile sine(int k, double a);                      // sin(k pi x / a)
    static Profile triangle(double peak_fraction, double a);   // unit peak, C0
    static Profile bump(double center_fraction, double width_fraction, double a);
};

// Names accepted by the CLI: zero | sine:k | triangle:x0 | bump:c,w
// (fractions of the length).
Profile make_named_profile(const std::string& spec, double a);

struct Mode {
    double omega;
    Eigen::VectorXd shape;  // interior sites, orthonormal under the plain dot product
};

// Closed-form spectrum: omega_h = sqrt(c^2 2(1-cos(pi h delta/a))/delta^2 + omega0^2),
// eigenvector sqrt(2/m) sin(pi h xi/a) at xi = i delta (Dirichlet).
double closed_form_frequency(const ChainConfig& cfg, int h);
std::vector<Mode> normal_modes(const ChainConfig& cfg);

// Independent route: eigenvalues of the coupling matrix (tridiagonal for
// Dirichlet, circulant for periodic), sorted ascending.
Eigen::VectorXd tridiagonal_frequencies(const ChainConfig& cfg);

// A_h, B_h from sampled Z, U; reconstruction at t = 0 reproduces the
// samples (discrete sine-basis completeness).
ModalDecomposition project_initial_data(const Profile& Z, const Profile& U, const ChainConfig& cfg);

ChainState evolve_modal(const ModalDecomposition& d, const ChainConfig& cfg, double t);

// Mode sum evaluated at an arbitrary position (trigonometric interpolation
// of the discrete solution).
double evolve_modal_at(const ModalDecomposition& d, const ChainConfig& cfg, double t, double x);

// Velocity Verlet on the chain equations of motion; requires
// dt * omega_max < 2 and raises if the energy drifts by more than 1%.
ChainState evolve_verlet(const ChainState& s, const ChainConfig& cfg, double dt, long long steps);

// E = sum (mu delta/2)(v_i^2 + c^2((y_{i+1}-y_i)/delta)^2 + omega0^2 y_i^2).
double chain_energy(const ChainState& s, const ChainConfig& cfg);

ChainState sample_state(const Profile& Z, const Profile& U, const ChainConfig& cfg);

// Partial sum of the continuum normal-mode solution with limit
// frequencies cp ih/a; coefficients by adaptive composite Simpson
// (4096 panels, doubled until 1e-10 stagnation).
class ContinuumSolution {
public:
    ContinuumSolution(const Profile& Z, const Profile& U, const ChainConfig& cfg, int mode_cutoff);
    double operator()(double x, double t) const;
    int modes() const { return static_cast<int>(z_coef_.size()); }

private:
    double a_ = 1.0;
    double c_ = 1.0;
    std::vector<double> z_coef_;
    std::vector<double> u_coef_;
};

double continuum_solution(const Profile& Z, const Profile& U, const ChainConfig& cfg,
                          double x, double t, int mode_cutoff);

// Traveling-wave solution (phi(x-ct) + phi(x+ct))/2 with phi the odd
// 2a-periodic extension of the datum, normalized so that t = 0 returns
// the datum itself.
double dalembert_solution(const Profile& phi, const ChainConfig& cfg, double x, double t);

struct ConvergenceStudy {
    std::vector<int> meshes;
    std::vector<double> deltas;
    std::vector<double> sup_errors;
    double fitted_order = 0.0;
    bool all_zero = false;
};

// Sup-norm distance between the discrete modal solution (interpolated)
// and the continuum solution at time t over the given positions, per
// mesh, with the fitted convergence order in delta.
ConvergenceStudy convergence_study(const Profile& Z, const Profile& U, const std::vector<int>& meshes,
                                   double t, const std::vector<double>& grid, const ChainConfig& base_cfg,
                                   int continuum_modes = 512);

} // namespace pslab
