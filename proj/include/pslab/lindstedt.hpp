#pragma once

#include <Eigen/Dense>

#include <array>
#include <type_traits>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "pslab/rational.hpp"
#include "pslab/trees.hpp"

namespace pslab {

template <int D>
using ModeVec = std::array<int, static_cast<std::size_t>(D)>;

template <std::size_t N>
int l1_norm(const std::array<int, N>& nu) {
    int s = 0;
    for (std::size_t j = 0; j < N; ++j) s += std::abs(nu[j]);
    return s;
}

template <std::size_t N>
bool is_zero_mode(const std::array<int, N>& nu) {
    for (std::size_t j = 0; j < N; ++j)
        if (nu[j] != 0) return false;
    return true;
}

// Canonical representative of {nu, -nu}: first nonzero component > 0.
// Returns the sign flip applied (+1 or -1), 0 for the zero mode.
template <std::size_t N>
int canonicalize_mode(std::array<int, N>& nu) {
    for (std::size_t j = 0; j < N; ++j) {
        if (nu[j] > 0) return 1;
        if (nu[j] < 0) {
            for (std::size_t i = 0; i < N; ++i) nu[i] = -nu[i];
            return -1;
        }
    }
    return 0;
}

// Finite trig series on T^D with scalar coefficients:
//   constant + sum_{nu canonical} a_nu cos(nu.alpha) + b_nu sin(nu.alpha).
template <int D, typename Scalar>
class TorusTrig {
public:
    struct Coef {
        Scalar c = ScalarTraits<Scalar>::zero();
        Scalar s = ScalarTraits<Scalar>::zero();
    };

    TorusTrig() = default;

    const Scalar& constant() const { return constant_; }
    Scalar& constant() { return constant_; }
    const std::map<ModeVec<D>, Coef>& terms() const { return terms_; }
    bool empty() const { return terms_.empty() && ScalarTraits<Scalar>::is_zero(constant_); }

    void add_cos(ModeVec<D> nu, const Scalar& v) {
        if (ScalarTraits<Scalar>::is_zero(v)) return;
        const int sign = canonicalize_mode(nu);
        if (sign == 0) {
            constant_ += v;
            return;
        }
        terms_[nu].c += v;
    }
    void add_sin(ModeVec<D> nu, const Scalar& v) {
        if (ScalarTraits<Scalar>::is_zero(v)) return;
        const int sign = canonicalize_mode(nu);
        if (sign == 0) return;
        if (sign > 0)
            terms_[nu].s += v;
        else
            terms_[nu].s -= v;
    }

    TorusTrig& operator+=(const TorusTrig& o) {
        constant_ += o.constant_;
        for (const auto& [nu, e] : o.terms_) {
            auto& mine = terms_[nu];
            mine.c += e.c;
            mine.s += e.s;
        }
        return *this;
    }
    friend TorusTrig operator+(TorusTrig a, const TorusTrig& b) { return a += b; }

    friend TorusTrig operator*(const Scalar& v, const TorusTrig& p) {
        TorusTrig r;
        if (ScalarTraits<Scalar>::is_zero(v)) return r;
        r.constant_ = v * p.constant_;
        for (const auto& [nu, e] : p.terms_) {
            auto& mine = r.terms_[nu];
            mine.c = v * e.c;
            mine.s = v * e.s;
        }
        return r;
    }

    friend TorusTrig operator*(const TorusTrig& a, const TorusTrig& b) {
        const Scalar half = ScalarTraits<Scalar>::one() / ScalarTraits<Scalar>::from_int(2);
        TorusTrig r;
        r.constant_ = a.constant_ * b.constant_;
        for (const auto& [nu, e] : b.terms_) {
            if (!ScalarTraits<Scalar>::is_zero(a.constant_)) {
                auto& mine = r.terms_[nu];
                mine.c += a.constant_ * e.c;
                mine.s += a.constant_ * e.s;
            }
        }
        for (const auto& [nu, e] : a.terms_) {
            if (!ScalarTraits<Scalar>::is_zero(b.constant_)) {
                auto& mine = r.terms_[nu];
                mine.c += b.constant_ * e.c;
                mine.s += b.constant_ * e.s;
            }
        }
        for (const auto& [nu, ea] : a.terms_) {
            for (const auto& [mu, eb] : b.terms_) {
                ModeVec<D> diff, sum;
                for (int j = 0; j < D; ++j) {
                    diff[j] = nu[j] - mu[j];
                    sum[j] = nu[j] + mu[j];
                }
                // cos cos
                if (!ScalarTraits<Scalar>::is_zero(ea.c) && !ScalarTraits<Scalar>::is_zero(eb.c)) {
                    const Scalar v = half * ea.c * eb.c;
                    r.add_cos(diff, v);
                    r.add_cos(sum, v);
                }
                // sin sin
                if (!ScalarTraits<Scalar>::is_zero(ea.s) && !ScalarTraits<Scalar>::is_zero(eb.s)) {
                    const Scalar v = half * ea.s * eb.s;
                    r.add_cos(diff, v);
                    r.add_cos(sum, -v);
                }
                // sin(a) cos(b): sin(A-B)/2 + sin(A+B)/2
                if (!ScalarTraits<Scalar>::is_zero(ea.s) && !ScalarTraits<Scalar>::is_zero(eb.c)) {
                    const Scalar v = half * ea.s * eb.c;
                    r.add_sin(diff, v);
                    r.add_sin(sum, v);
                }
                // cos(a) sin(b): sin(B-A)/2 + sin(A+B)/2
                if (!ScalarTraits<Scalar>::is_zero(ea.c) && !ScalarTraits<Scalar>::is_zero(eb.s)) {
                    const Scalar v = half * ea.c * eb.s;
                    ModeVec<D> mdiff;
                    for (int j = 0; j < D; ++j) mdiff[j] = -diff[j];
                    r.add_sin(mdiff, v);
                    r.add_sin(sum, v);
                }
            }
        }
        r.prune();
        return r;
    }

    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (ScalarTraits<Scalar>::is_zero(it->second.c) && ScalarTraits<Scalar>::is_zero(it->second.s))
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    template <typename Real>
    Real evaluate(const std::array<Real, D>& alpha) const {
        Real acc = static_cast<Real>(ScalarTraits<Scalar>::to_double(constant_));
        for (const auto& [nu, e] : terms_) {
            Real phase = 0;
            for (int j = 0; j < D; ++j) phase += static_cast<Real>(nu[j]) * alpha[static_cast<std::size_t>(j)];
            acc += static_cast<Real>(ScalarTraits<Scalar>::to_double(e.c)) * std::cos(phase) +
                   static_cast<Real>(ScalarTraits<Scalar>::to_double(e.s)) * std::sin(phase);
        }
        return acc;
    }

private:
    Scalar constant_ = ScalarTraits<Scalar>::zero();
    std::map<ModeVec<D>, Coef> terms_;
};

// Even trig polynomial f(alpha) = sum_{nu canonical} 2 f_nu cos(nu.alpha);
// the zero mode is conventionally absent. f_nu = f_{-nu} holds by storage.
template <int D, typename Scalar>
struct Potential {
    std::map<ModeVec<D>, Scalar> half_modes;

    void add_mode(ModeVec<D> nu, const Scalar& f_nu) {
        const int sign = canonicalize_mode(nu);
        if (sign == 0) throw std::invalid_argument("Potential: zero mode is fixed to 0");
        half_modes[nu] += f_nu;
    }
    int support_radius() const {
        int r = 0;
        for (const auto& [nu, v] : half_modes) r = std::max(r, l1_norm(nu));
        return r;
    }
};

// Odd (pure sine) Fourier data of one expansion order of the conjugation:
// component j of h^[k](alpha) = sum_nu sine[nu][j] sin(nu.alpha).
template <int D, typename Scalar>
struct TorusFourier {
    std::map<ModeVec<D>, std::array<Scalar, D>> sine;

    bool empty() const { return sine.empty(); }
    int support_radius() const {
        int r = 0;
        for (const auto& [nu, v] : sine) r = std::max(r, l1_norm(nu));
        return r;
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& [nu, v] : sine)
            for (int j = 0; j < D; ++j) m = std::max(m, std::abs(ScalarTraits<Scalar>::to_double(v[static_cast<std::size_t>(j)])));
        return m;
    }
};

template <int D>
struct DiophantineFrequency {
    std::array<double, D> omega{};
    double C0 = 1.0;
    double tau = 1.0;
    int cutoff = 0;

    // Checks |omega.nu| >= (1/C0) |nu|^-tau for 0 < |nu|_1 <= cutoff;
    // throws "resonant frequency" on an exact zero.
    DiophantineFrequency(std::array<double, D> w, double C0_, double tau_, int cutoff_);
};

namespace lindstedt_detail {

// Graded multiply of eps-expansions (index = eps order), truncated at K.
template <int D, typename Scalar>
std::vector<TorusTrig<D, Scalar>> graded_product(const std::vector<TorusTrig<D, Scalar>>& a,
                                                 const std::vector<TorusTrig<D, Scalar>>& b, int K) {
    std::vector<TorusTrig<D, Scalar>> r(static_cast<std::size_t>(K) + 1);
    for (std::size_t i = 0; i < a.size() && static_cast<int>(i) <= K; ++i) {
        if (a[i].empty()) continue;
        for (std::size_t j = 0; j < b.size() && static_cast<int>(i + j) <= K; ++j) {
            if (b[j].empty()) continue;
            r[i + j] += a[i] * b[j];
        }
    }
    return r;
}

} // namespace lindstedt_detail

// One order of the Fourier-space recursion for h + (w.d)^-2(eps df(a+h)) = 0:
//   h^[k] = -(w.d)^-2 [ df(alpha + h) ]_{eps^{k-1}},
// (w.d)^-2 acting on sin(nu.alpha) as multiplication by -1/(w.nu)^2. The
// zero Fourier mode of the bracket must vanish (checked), and the output
// is odd (pure sine, checked).
template <int D, typename Scalar>
TorusFourier<D, Scalar> solve_order(int k, const std::vector<TorusFourier<D, Scalar>>& history,
                                    const Potential<D, Scalar>& f,
                                    const std::type_identity_t<std::array<Scalar, static_cast<std::size_t>(D)>>& omega) {
    if (k < 1) throw std::invalid_argument("solve_order: k >= 1");
    if (static_cast<int>(history.size()) < k - 1)
        throw std::invalid_argument("solve_order: history must hold orders 1..k-1");

    using Trig = TorusTrig<D, Scalar>;
    const Scalar zero = ScalarTraits<Scalar>::zero();
    const Scalar one = ScalarTraits<Scalar>::one();
    const int kcut = k - 1;

    // Gradient components of f(alpha + h), eps-graded up to k-1.
    std::vector<std::vector<Trig>> grad(static_cast<std::size_t>(D));
    for (int j = 0; j < D; ++j)
        grad[static_cast<std::size_t>(j)].assign(static_cast<std::size_t>(kcut) + 1, Trig{});

    for (const auto& [nu, f_nu] : f.half_modes) {
        // w = nu . h(alpha), orders 1..k-1.
        std::vector<Trig> w(static_cast<std::size_t>(kcut) + 1);
        for (int ord = 1; ord <= kcut; ++ord) {
            if (ord > static_cast<int>(history.size())) break;
            const auto& hk = history[static_cast<std::size_t>(ord - 1)];
            Trig acc;
            for (const auto& [mu, comps] : hk.sine) {
                Scalar dot = zero;
                for (int j = 0; j < D; ++j) dot += ScalarTraits<Scalar>::from_int(nu[j]) * comps[static_cast<std::size_t>(j)];
                acc.add_sin(mu, dot);
            }
            w[static_cast<std::size_t>(ord)] = std::move(acc);
        }

        // cos(w), sin(w) as graded Taylor sums; w has no order-0 part.
        std::vector<Trig> cosw(static_cast<std::size_t>(kcut) + 1), sinw(static_cast<std::size_t>(kcut) + 1);
        cosw[0].constant() = one;
        std::vector<Trig> wpow = w;  // w^1
        Scalar fact = one;
        for (int m = 1; m <= kcut; ++m) {
            fact = fact * ScalarTraits<Scalar>::from_int(m);
            const Scalar coef = ((m / 2) % 2 == 0 ? one : -one) / fact;  // (-1)^(m/2) / m!
            auto& target = (m % 2 == 1) ? sinw : cosw;
            for (int ord = m; ord <= kcut; ++ord) target[static_cast<std::size_t>(ord)] += coef * wpow[static_cast<std::size_t>(ord)];
            if (m < kcut) wpow = lindstedt_detail::graded_product(wpow, w, kcut);
        }

        // sin(nu.alpha + w) = sin(nu.a) cos(w) + cos(nu.a) sin(w).
        Trig sin_nu, cos_nu;
        sin_nu.add_sin(nu, one);
        cos_nu.add_cos(nu, one);
        for (int ord = 0; ord <= kcut; ++ord) {
            Trig phase = sin_nu * cosw[static_cast<std::size_t>(ord)] + cos_nu * sinw[static_cast<std::size_t>(ord)];
            // (d_j f)(y) = -sum 2 f_nu nu_j sin(nu.y)
            for (int j = 0; j < D; ++j) {
                if (nu[j] == 0) continue;
                const Scalar s = -(ScalarTraits<Scalar>::from_int(2 * nu[j]) * f_nu);
                grad[static_cast<std::size_t>(j)][static_cast<std::size_t>(ord)] += s * phase;
            }
        }
    }

    // Order k-1 slice; solvability and parity checks, then the inverse
    // operator: sine coefficient b_nu maps to b_nu / (w.nu)^2 in
    // h^[k] = -(w.d)^-2 g  (sign fixed by the k=1 pendulum test).
    TorusFourier<D, Scalar> out;
    for (int j = 0; j < D; ++j) {
        const Trig& g = grad[static_cast<std::size_t>(j)][static_cast<std::size_t>(kcut)];
        const double scale = std::max(1.0, g.template evaluate<double>(std::array<double, D>{}));
        if constexpr (ScalarTraits<Scalar>::exact) {
            if (!ScalarTraits<Scalar>::is_zero(g.constant()))
                throw std::runtime_error("solve_order: solvability violated (nonzero mean of df(a+h))");
        } else {
            if (std::abs(ScalarTraits<Scalar>::to_double(g.constant())) > 1e-12 * scale)
                throw std::runtime_error("solve_order: solvability violated (nonzero mean of df(a+h))");
        }
        for (const auto& [nu, e] : g.terms()) {
            if constexpr (ScalarTraits<Scalar>::exact) {
                if (!ScalarTraits<Scalar>::is_zero(e.c))
                    throw std::runtime_error("solve_order: even component in an odd order (parity bug)");
            } else {
                if (std::abs(ScalarTraits<Scalar>::to_double(e.c)) > 1e-12 * scale)
                    throw std::runtime_error("solve_order: even component in an odd order (parity bug)");
            }
            if (ScalarTraits<Scalar>::is_zero(e.s)) continue;
            Scalar od = zero;
            for (int i = 0; i < D; ++i) od += omega[static_cast<std::size_t>(i)] * ScalarTraits<Scalar>::from_int(nu[i]);
            if (ScalarTraits<Scalar>::is_zero(od))
                throw std::runtime_error("solve_order: resonant frequency (omega.nu = 0 on the support)");
            out.sine[nu][static_cast<std::size_t>(j)] = e.s / (od * od);
        }
    }
    // Drop all-zero rows.
    for (auto it = out.sine.begin(); it != out.sine.end();) {
        bool all_zero = true;
        for (int j = 0; j < D; ++j)
            if (!ScalarTraits<Scalar>::is_zero(it->second[static_cast<std::size_t>(j)])) all_zero = false;
        it = all_zero ? out.sine.erase(it) : std::next(it);
    }
    return out;
}

template <int D, typename Scalar>
std::vector<TorusFourier<D, Scalar>> lindstedt_orders(int K, const Potential<D, Scalar>& f,
                                                      const std::type_identity_t<std::array<Scalar, static_cast<std::size_t>(D)>>& omega) {
    std::vector<TorusFourier<D, Scalar>> history;
    history.reserve(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) history.push_back(solve_order(k, history, f, omega));
    return history;
}

// Same order through the tree expansion: sum over decorated trees with k
// nodes and mode labels in +-support(f). Per tree, with v' the node below
// v across a line and nu(line) the momentum flowing through it,
//   sine contribution = -multiplicity * (nu_root)_j / (w.nu(root line))^2
//                       * prod_v f_{nu_v}/k_v! * prod_internal -nu_v.nu_v' / (w.nu(line))^2,
// accumulated at the canonical key with the reflection sign; the
// mode-reflected tree supplies the matching half. Trees carrying a
// zero-momentum line contribute nothing (their reflections cancel
// pairwise; the recursion route is the arbiter).
template <int D, typename Scalar>
TorusFourier<D, Scalar> tree_expansion_order(int k, const Potential<D, Scalar>& f,
                                             const std::type_identity_t<std::array<Scalar, static_cast<std::size_t>(D)>>& omega) {
    if (k < 1 || k > 5) throw std::invalid_argument("tree_expansion_order: 1 <= k <= 5");
    const Scalar zero = ScalarTraits<Scalar>::zero();

    // Mode alphabet: both signs of every stored half mode.
    std::vector<ModeVec<D>> modes;
    std::vector<Scalar> mode_coef;
    for (const auto& [nu, f_nu] : f.half_modes) {
        modes.push_back(nu);
        mode_coef.push_back(f_nu);
        ModeVec<D> neg;
        for (int j = 0; j < D; ++j) neg[j] = -nu[j];
        modes.push_back(neg);
        mode_coef.push_back(f_nu);
    }
    if (modes.size() > 8) throw std::invalid_argument("tree_expansion_order: potential support too large (guard)");

    TorusFourier<D, Scalar> out;
    const auto trees = enumerate_labeled_trees(k, static_cast<int>(modes.size()));

    struct Walk {
        const std::vector<ModeVec<D>>& modes;
        const std::vector<Scalar>& mode_coef;
        const std::array<Scalar, D>& omega;
        bool dead = false;

        // Returns the subtree momentum; multiplies `value` by the node
        // factors and by the internal-line factors of all lines inside the
        // subtree (the line above `t` is handled by the caller).
        ModeVec<D> visit(const DecoratedTree& t, Scalar& value) {
            const auto& nu_v = modes[static_cast<std::size_t>(t.label)];
            ModeVec<D> momentum = nu_v;
            value = value * mode_coef[static_cast<std::size_t>(t.label)];
            value = value / factorial_scalar(child_count(t));
            for (const auto& c : t.children) {
                Scalar sub = ScalarTraits<Scalar>::one();
                const ModeVec<D> cm = visit(c, sub);
                if (dead) return momentum;
                if (is_zero_mode(cm)) {
                    dead = true;
                    return momentum;
                }
                // Internal line c -> t: -nu_t . nu_c / (w.nu(line))^2.
                Scalar dot = ScalarTraits<Scalar>::zero();
                Scalar od = ScalarTraits<Scalar>::zero();
                const auto& nu_c = modes[static_cast<std::size_t>(c.label)];
                for (int j = 0; j < D; ++j) {
                    dot += ScalarTraits<Scalar>::from_int(nu_v[j] * nu_c[j]);
                    od += omega[static_cast<std::size_t>(j)] * ScalarTraits<Scalar>::from_int(cm[j]);
                }
                value = value * sub * (-(dot / (od * od)));
                for (int j = 0; j < D; ++j) momentum[j] += cm[j];
            }
            return momentum;
        }

        static Scalar factorial_scalar(int n) {
            Scalar r = ScalarTraits<Scalar>::one();
            for (int i = 2; i <= n; ++i) r = r * ScalarTraits<Scalar>::from_int(i);
            return r;
        }
    };

    for (const auto& [tree, mult] : trees) {
        Walk walk{modes, mode_coef, omega};
        Scalar value = ScalarTraits<Scalar>::one();
        ModeVec<D> total = walk.visit(tree, value);
        if (walk.dead || is_zero_mode(total)) continue;

        Scalar od = zero;
        for (int j = 0; j < D; ++j) od += omega[static_cast<std::size_t>(j)] * ScalarTraits<Scalar>::from_int(total[j]);
        value = value / (od * od);
        value = ScalarTraits<Scalar>::from_int(-mult) * value;

        const auto& nu_root = modes[static_cast<std::size_t>(tree.label)];
        ModeVec<D> key = total;
        const int sign = canonicalize_mode(key);
        for (int j = 0; j < D; ++j) {
            if (nu_root[j] == 0) continue;
            const Scalar contrib = ScalarTraits<Scalar>::from_int(sign * nu_root[j]) * value;
            out.sine[key][static_cast<std::size_t>(j)] += contrib;
        }
    }

    for (auto it = out.sine.begin(); it != out.sine.end();) {
        bool all_zero = true;
        for (int j = 0; j < D; ++j)
            if (!ScalarTraits<Scalar>::is_zero(it->second[static_cast<std::size_t>(j)])) all_zero = false;
        it = all_zero ? out.sine.erase(it) : std::next(it);
    }
    return out;
}

struct SmallDivisor {
    std::vector<int> nu;
    double omega_dot_nu = 0.0;
    double diophantine_bound = 0.0;  // (1/C0) |nu|^-tau
};

struct SmallDivisorReport {
    std::vector<SmallDivisor> worst;  // ascending |omega.nu|
    double best_C0 = 0.0;             // smallest C0 making the bound hold up to the cutoff
    long long combinations = 0;
};

// Scans canonical-half integer vectors with |nu|_1 <= cutoff; throws
// "resonant frequency" on an exact zero of omega.nu.
SmallDivisorReport small_divisor_report(const std::vector<double>& omega, double tau, int cutoff,
                                        std::size_t keep = 16);

template <int D>
DiophantineFrequency<D>::DiophantineFrequency(std::array<double, D> w, double C0_, double tau_, int cutoff_)
    : omega(w), C0(C0_), tau(tau_), cutoff(cutoff_) {
    if (!(C0 > 0.0) || !(tau > 0.0) || cutoff < 1)
        throw std::invalid_argument("DiophantineFrequency: C0 > 0, tau > 0, cutoff >= 1");
    const auto report = small_divisor_report(std::vector<double>(omega.begin(), omega.end()), tau, cutoff, 4);
    if (report.best_C0 > C0)
        throw std::invalid_argument("DiophantineFrequency: |omega.nu| >= C0^-1 |nu|^-tau fails below the cutoff");
}

struct DecayFit {
    double c = 0.0;
    double kappa = 0.0;
    double max_violation = 0.0;  // of log|h| <= k log c - kappa |nu|; <= 0 by construction
    bool degenerate = false;     // no nonzero coefficients
    struct Row {
        int k;
        int nu_l1;
        double magnitude;
    };
    std::vector<Row> table;
};

// Smallest envelope |h^[k]_nu| <= c^k exp(-kappa |nu|) over the computed
// orders: least-squares fit of the log bound, kappa clamped at 0, then
// log c raised until no violations remain.
template <int D, typename Scalar>
DecayFit decay_fit(const std::vector<TorusFourier<D, Scalar>>& orders) {
    if (orders.size() < 3) throw std::invalid_argument("decay_fit: needs orders 1..K with K >= 3");
    DecayFit fit;
    for (std::size_t ki = 0; ki < orders.size(); ++ki) {
        for (const auto& [nu, comps] : orders[ki].sine) {
            double mag = 0.0;
            for (int j = 0; j < D; ++j)
                mag = std::max(mag, std::abs(ScalarTraits<Scalar>::to_double(comps[static_cast<std::size_t>(j)])));
            if (mag > 0.0)
                fit.table.push_back({static_cast<int>(ki) + 1, l1_norm(nu), mag});
        }
    }
    if (fit.table.empty()) {
        fit.degenerate = true;
        return fit;
    }

    Eigen::MatrixXd M(static_cast<Eigen::Index>(fit.table.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(fit.table.size()));
    for (std::size_t i = 0; i < fit.table.size(); ++i) {
        M(static_cast<Eigen::Index>(i), 0) = fit.table[i].k;
        M(static_cast<Eigen::Index>(i), 1) = -fit.table[i].nu_l1;
        y(static_cast<Eigen::Index>(i)) = std::log(fit.table[i].magnitude);
    }
    Eigen::Vector2d sol = M.colPivHouseholderQr().solve(y);
    double log_c = sol(0);
    double kappa = sol(1);
    if (kappa < 0.0) {
        kappa = 0.0;
        double num = 0.0, den = 0.0;
        for (const auto& row : fit.table) {
            num += row.k * std::log(row.magnitude);
            den += static_cast<double>(row.k) * row.k;
        }
        log_c = num / den;
    }
    double shift = 0.0;
    for (const auto& row : fit.table) {
        const double viol = std::log(row.magnitude) - (row.k * log_c - kappa * row.nu_l1);
        shift = std::max(shift, viol / row.k);
    }
    log_c += shift;
    fit.c = std::exp(log_c);
    fit.kappa = kappa;
    fit.max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& row : fit.table)
        fit.max_violation = std::max(fit.max_violation,
                                     std::log(row.magnitude) - (row.k * log_c - kappa * row.nu_l1));
    return fit;
}

struct ConjugationPoint {
    double epsilon = 0.0;
    double residual = 0.0;
    double truncation_tail = 0.0;  // relative Fourier mass at the support edge
};

struct ConjugationReport {
    std::vector<ConjugationPoint> points;
    double slope_fit = 0.0;   // d log residual / d log eps
    bool truncation_flagged = false;
};

// Sup over an alpha-grid of |h_eps(alpha) + (w.d)^-2 [eps df(alpha+h_eps)]|,
// the nonlinear term's inverse taken on the truncated Fourier support
// |nu|_inf <= (K+1) R_f. Evaluations run in long double; pass long double
// orders when the residual scale approaches the double coefficient noise
// (K = 4 at eps = 1e-4 sits there).
template <int D, typename Scalar = double>
ConjugationReport verify_conjugation(const std::vector<TorusFourier<D, Scalar>>& orders,
                                     const Potential<D, Scalar>& f,
                                     const std::type_identity_t<std::array<Scalar, static_cast<std::size_t>(D)>>& omega,
                                     const std::vector<double>& epsilons, int grid_size) {
    using LD = long double;
    using C = std::complex<LD>;
    constexpr LD pi_ld = 3.14159265358979323846264338327950288L;
    const auto ld = [](const Scalar& x) -> LD {
        if constexpr (std::is_same_v<Scalar, long double>)
            return x;
        else
            return static_cast<LD>(ScalarTraits<Scalar>::to_double(x));
    };
    if (grid_size < 8) throw std::invalid_argument("verify_conjugation: grid_size >= 8");
    const int K = static_cast<int>(orders.size());

    int rf_inf = 1;
    for (const auto& [nu, v] : f.half_modes)
        for (int j = 0; j < D; ++j) rf_inf = std::max(rf_inf, std::abs(nu[j]));
    const int ncut = (K + 1) * rf_inf;
    const int G = grid_size;
    if (G <= 2 * ncut) throw std::invalid_argument("verify_conjugation: grid too coarse for the mode cutoff");

    long long points = 1;
    for (int a = 0; a < D; ++a) points *= G;

    // Per-axis twiddles exp(i n 2 pi g / G), n in [-ncut, ncut].
    std::vector<std::vector<C>> twiddle(static_cast<std::size_t>(2 * ncut + 1),
                                        std::vector<C>(static_cast<std::size_t>(G)));
    for (int n = -ncut; n <= ncut; ++n)
        for (int g = 0; g < G; ++g) {
            const LD phase = 2.0L * pi_ld * n * g / G;
            twiddle[static_cast<std::size_t>(n + ncut)][static_cast<std::size_t>(g)] = C(std::cos(phase), std::sin(phase));
        }

    // All mode vectors in the box |nu|_inf <= ncut (full box; the zero
    // mode is skipped when inverting).
    std::vector<std::array<int, D>> box;
    {
        std::array<int, D> nu;
        nu.fill(-ncut);
        while (true) {
            box.push_back(nu);
            int a = 0;
            for (; a < D; ++a) {
                if (++nu[a] <= ncut) break;
                nu[a] = -ncut;
            }
            if (a == D) break;
        }
    }

    ConjugationReport report;
    std::vector<double> log_eps, log_res;

    for (double eps : epsilons) {
        if (!(eps >= 0.0)) throw std::invalid_argument("verify_conjugation: eps >= 0");
        // Combined sine coefficients of h_eps per mode/component.
        std::map<ModeVec<D>, std::array<LD, D>> comb;
        LD epsk = 1.0L;
        for (int k = 1; k <= K; ++k) {
            epsk *= static_cast<LD>(eps);
            for (const auto& [nu, comps] : orders[static_cast<std::size_t>(k - 1)].sine) {
                auto& row = comb.try_emplace(nu, std::array<LD, D>{}).first->second;
                for (int j = 0; j < D; ++j) row[static_cast<std::size_t>(j)] += epsk * ld(comps[static_cast<std::size_t>(j)]);
            }
        }

        // Pointwise h_eps and T = eps * grad f(alpha + h); store T per point.
        std::vector<std::array<LD, D>> h_grid(static_cast<std::size_t>(points));
        std::vector<std::array<LD, D>> t_grid(static_cast<std::size_t>(points));
        std::array<int, D> gidx{};
        for (long long p = 0; p < points; ++p) {
            std::array<LD, D> alpha;
            for (int a = 0; a < D; ++a) alpha[static_cast<std::size_t>(a)] = 2.0L * pi_ld * gidx[a] / G;
            std::array<LD, D> h{};
            for (const auto& [nu, comps] : comb) {
                LD phase = 0.0L;
                for (int a = 0; a < D; ++a) phase += static_cast<LD>(nu[a]) * alpha[static_cast<std::size_t>(a)];
                const LD s = std::sin(phase);
                for (int j = 0; j < D; ++j) h[static_cast<std::size_t>(j)] += comps[static_cast<std::size_t>(j)] * s;
            }
            h_grid[static_cast<std::size_t>(p)] = h;
            std::array<LD, D> t{};
            for (const auto& [nu, f_nu] : f.half_modes) {
                LD phase = 0.0L;
                for (int a = 0; a < D; ++a)
                    phase += static_cast<LD>(nu[a]) * (alpha[static_cast<std::size_t>(a)] + h[static_cast<std::size_t>(a)]);
                const LD s = std::sin(phase);
                for (int j = 0; j < D; ++j)
                    t[static_cast<std::size_t>(j)] += -2.0L * ld(f_nu) * nu[j] * s;
            }
            for (int j = 0; j < D; ++j) t[static_cast<std::size_t>(j)] *= static_cast<LD>(eps);
            t_grid[static_cast<std::size_t>(p)] = t;

            for (int a = 0; a < D; ++a) {
                if (++gidx[a] < G) break;
                gidx[a] = 0;
            }
        }

        // DFT of T on the mode box, inverse operator, residual.
        std::vector<std::array<C, D>> that(box.size(), std::array<C, D>{});
        gidx.fill(0);
        for (long long p = 0; p < points; ++p) {
            for (std::size_t bi = 0; bi < box.size(); ++bi) {
                C w(1.0L, 0.0L);
                for (int a = 0; a < D; ++a)
                    w *= std::conj(twiddle[static_cast<std::size_t>(box[bi][a] + ncut)][static_cast<std::size_t>(gidx[a])]);
                for (int j = 0; j < D; ++j) that[bi][static_cast<std::size_t>(j)] += w * t_grid[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
            }
            for (int a = 0; a < D; ++a) {
                if (++gidx[a] < G) break;
                gidx[a] = 0;
            }
        }
        for (auto& row : that)
            for (int j = 0; j < D; ++j) row[static_cast<std::size_t>(j)] /= static_cast<LD>(points);

        // Truncation diagnostic: Fourier mass on the box edge vs maximum.
        LD max_mass = 0.0L, edge_mass = 0.0L;
        for (std::size_t bi = 0; bi < box.size(); ++bi) {
            int linf = 0;
            for (int a = 0; a < D; ++a) linf = std::max(linf, std::abs(box[bi][a]));
            LD mass = 0.0L;
            for (int j = 0; j < D; ++j) mass = std::max(mass, std::abs(that[bi][static_cast<std::size_t>(j)]));
            max_mass = std::max(max_mass, mass);
            if (linf == ncut) edge_mass = std::max(edge_mass, mass);
        }

        LD sup = 0.0L;
        gidx.fill(0);
        for (long long p = 0; p < points; ++p) {
            for (int j = 0; j < D; ++j) {
                C acc(0.0L, 0.0L);
                for (std::size_t bi = 0; bi < box.size(); ++bi) {
                    LD od = 0.0L;
                    bool zero = true;
                    for (int a = 0; a < D; ++a) {
                        if (box[bi][a] != 0) zero = false;
                        od += ld(omega[static_cast<std::size_t>(a)]) * box[bi][a];
                    }
                    if (zero) continue;
                    C w(1.0L, 0.0L);
                    for (int a = 0; a < D; ++a)
                        w *= twiddle[static_cast<std::size_t>(box[bi][a] + ncut)][static_cast<std::size_t>(gidx[a])];
                    acc += (-1.0L / (od * od)) * that[bi][static_cast<std::size_t>(j)] * w;
                }
                const LD res = h_grid[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)] + acc.real();
                sup = std::max(sup, std::abs(res));
            }
            for (int a = 0; a < D; ++a) {
                if (++gidx[a] < G) break;
                gidx[a] = 0;
            }
        }

        ConjugationPoint pt;
        pt.epsilon = eps;
        pt.residual = static_cast<double>(sup);
        pt.truncation_tail = max_mass > 0.0L ? static_cast<double>(edge_mass / max_mass) : 0.0;
        if (pt.truncation_tail > 1e-3) report.truncation_flagged = true;
        report.points.push_back(pt);
        if (eps > 0.0 && sup > 0.0L) {
            log_eps.push_back(std::log(eps));
            log_res.push_back(static_cast<double>(std::log(sup)));
        }
    }

    if (log_eps.size() >= 2) {
        Eigen::MatrixXd M(static_cast<Eigen::Index>(log_eps.size()), 2);
        Eigen::VectorXd y(static_cast<Eigen::Index>(log_eps.size()));
        for (std::size_t i = 0; i < log_eps.size(); ++i) {
            M(static_cast<Eigen::Index>(i), 0) = 1.0;
            M(static_cast<Eigen::Index>(i), 1) = log_eps[i];
            y(static_cast<Eigen::Index>(i)) = log_res[i];
        }
        report.slope_fit = M.colPivHouseholderQr().solve(y)(1);
    }
    return report;
}

// The two stock systems: f = cos(a) with omega = 1, and
// f = cos(a1) + cos(a1+a2) with the golden-mean vector (1, (1+sqrt 5)/2).
template <typename Scalar>
Potential<1, Scalar> pendulum_potential_t() {
    Potential<1, Scalar> f;
    f.add_mode({1}, ScalarTraits<Scalar>::one() / ScalarTraits<Scalar>::from_int(2));
    return f;
}
template <typename Scalar>
std::array<Scalar, 1> pendulum_omega_t() {
    return {ScalarTraits<Scalar>::one()};
}
template <typename Scalar>
Potential<2, Scalar> golden_potential_t() {
    Potential<2, Scalar> f;
    const Scalar half = ScalarTraits<Scalar>::one() / ScalarTraits<Scalar>::from_int(2);
    f.add_mode({1, 0}, half);
    f.add_mode({1, 1}, half);
    return f;
}
template <typename Scalar>
std::array<Scalar, 2> golden_omega_t() {
    return {Scalar(1), (Scalar(1) + std::sqrt(Scalar(5))) / Scalar(2)};
}

Potential<1, double> pendulum_potential();
std::array<double, 1> pendulum_omega();
Potential<1, Rational> pendulum_potential_exact();
std::array<Rational, 1> pendulum_omega_exact();
Potential<2, double> golden_potential();
std::array<double, 2> golden_omega();

} // namespace pslab
