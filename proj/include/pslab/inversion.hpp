#pragma once

#include <stdexcept>
#include <vector>

#include "pslab/multi_series.hpp"
#include "pslab/series.hpp"
#include "pslab/trees.hpp"

namespace pslab {

// Taylor data of a map phi : R^n -> R^n around a base point, components
// stored as multivariate series in the displacement u = x - base.
template <typename Scalar>
struct FunctionJet {
    std::vector<Scalar> base;
    std::vector<MultiSeries<Scalar>> components;

    int dimension() const { return static_cast<int>(components.size()); }
    int order() const { return components.empty() ? 0 : components.front().max_order(); }

    static FunctionJet scalar(const TruncatedSeries<Scalar>& phi, const Scalar& base_point = ScalarTraits<Scalar>::zero()) {
        FunctionJet j;
        j.base.push_back(base_point);
        j.components.push_back(from_univariate(phi));
        return j;
    }

    TruncatedSeries<Scalar> scalar_series() const {
        if (dimension() != 1) throw std::invalid_argument("FunctionJet: not a scalar jet");
        return to_univariate(components[0]);
    }

    void validate() const {
        if (components.empty() || base.size() != components.size())
            throw std::invalid_argument("FunctionJet: component/base shape mismatch");
        for (const auto& c : components)
            if (c.nvars() != dimension() || c.max_order() != order())
                throw std::invalid_argument("FunctionJet: inconsistent component shapes");
    }
};

// One representative per pivot-equivalence class of decorated trees with
// k branches (= k nodes, each node's outgoing line counted) and component
// labels in {1..n}, with label-assignment multiplicities.
inline std::vector<TreeWithMultiplicity> enumerate_trees(int k, int n) {
    if (k < 1 || k > 8) throw std::invalid_argument("enumerate_trees: 1 <= k <= 8");
    if (n < 1 || n > 3) throw std::invalid_argument("enumerate_trees: 1 <= n <= 3");
    return enumerate_labeled_trees(k, n);
}

// Val(theta): product over nodes of (1/k_v!) d^{k_v} phi_{j_v}, derivative
// indices contracted with the children's labels, root label left free.
// Returned as a jet in the displacement variables; the constant term is
// the value at the base point.
template <typename Scalar>
MultiSeries<Scalar> tree_value_series(const DecoratedTree& t, const FunctionJet<Scalar>& jet) {
    jet.validate();
    if (t.label >= jet.dimension()) throw std::invalid_argument("tree_value: label out of range");
    if (jet.order() < child_count(t))
        throw std::invalid_argument("tree_value: jet order below a node's branch count");
    MultiSeries<Scalar> f = jet.components[static_cast<std::size_t>(t.label)];
    for (const auto& c : t.children) f = derivative(f, c.label);
    f = (ScalarTraits<Scalar>::one() / factorial<Scalar>(child_count(t))) * f;
    for (const auto& c : t.children) f = f * tree_value_series(c, jet);
    return f;
}

template <typename Scalar>
Scalar tree_value(const DecoratedTree& t, const FunctionJet<Scalar>& jet) {
    return tree_value_series(t, jet).value_at_zero();
}

// (1/k!) d^{k-1}( phi(a)^k psi'(a) ), scalar case, as a series in the
// displacement from the base point. Exact for polynomial jets; in general
// correct through the jet order when phi has valuation >= 2.
template <typename Scalar>
TruncatedSeries<Scalar> lagrange_term(int k, const FunctionJet<Scalar>& jet, const FunctionJet<Scalar>& psi) {
    if (k < 1) throw std::invalid_argument("lagrange_term: k >= 1");
    jet.validate();
    psi.validate();
    if (jet.dimension() != 1 || psi.dimension() != 1)
        throw std::invalid_argument("lagrange_term: scalar case only (use the tree route for n > 1)");
    if (jet.order() < k) throw std::invalid_argument("lagrange_term: jet order must be >= k");

    const int work = jet.order() + k - 1;
    const auto phi = jet.scalar_series().extended(work);
    const auto dpsi = series_derivative(psi.scalar_series()).extended(work);

    auto p = TruncatedSeries<Scalar>::constant(ScalarTraits<Scalar>::one(), work);
    for (int i = 0; i < k; ++i) p = p * phi;
    p = p * dpsi;
    for (int i = 0; i < k - 1; ++i) p = series_derivative(p);
    return (ScalarTraits<Scalar>::one() / factorial<Scalar>(k)) * p;
}

// Per-order terms of Eq. x(a) = a + sum_k (1/k!) d^{k-1}(phi^k), psi = id.
template <typename Scalar>
std::vector<TruncatedSeries<Scalar>> lagrange_terms(const FunctionJet<Scalar>& jet, int K) {
    auto psi = FunctionJet<Scalar>::scalar(TruncatedSeries<Scalar>::identity(std::max(1, jet.order())),
                                           jet.base.at(0));
    std::vector<TruncatedSeries<Scalar>> terms;
    terms.reserve(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) terms.push_back(lagrange_term(k, jet, psi));
    return terms;
}

// Inverse series of a = x - phi(x) around the base point, as a power
// series in a's displacement. Requires phi(base) = 0 and phi'(base) = 0
// (valuation >= 2), which makes the k-sum finite at every power.
template <typename Scalar>
TruncatedSeries<Scalar> invert_series(const FunctionJet<Scalar>& jet, int K) {
    jet.validate();
    if (jet.dimension() != 1) throw std::invalid_argument("invert_series: scalar overload");
    const auto phi = jet.scalar_series();
    if (phi.valuation() < 2)
        throw std::invalid_argument("invert_series: phi must vanish to second order at the base point");

    auto x = TruncatedSeries<Scalar>::identity(K);
    auto work_jet = FunctionJet<Scalar>::scalar(phi.extended(std::max(K, jet.order())), jet.base[0]);
    auto psi = FunctionJet<Scalar>::scalar(TruncatedSeries<Scalar>::identity(work_jet.order()), jet.base[0]);
    for (int k = 1; k <= K; ++k) {
        const auto term = lagrange_term(k, work_jet, psi).truncated(K);
        // Terms start at order k+1 for valuation-2 phi; stop once empty.
        if (term.valuation() > K && k > 1) break;
        x = x + term.extended(K);
    }
    return x;
}

// Vector case via the tree expansion: component j of x(a) is
// a_j + sum_k sum_{trees, root label j} multiplicity * Val(theta).
template <typename Scalar>
std::vector<MultiSeries<Scalar>> invert_series_vector(const FunctionJet<Scalar>& jet, int K) {
    jet.validate();
    const int n = jet.dimension();
    if (n > 3) throw std::invalid_argument("invert_series_vector: n <= 3");
    for (const auto& comp : jet.components) {
        bool low_order_zero = ScalarTraits<Scalar>::is_zero(comp.value_at_zero());
        for (int j = 0; j < n && low_order_zero; ++j) {
            std::array<std::uint8_t, 4> e{0, 0, 0, 0};
            e[static_cast<std::size_t>(j)] = 1;
            low_order_zero = ScalarTraits<Scalar>::is_zero(comp.coefficient(e));
        }
        if (!low_order_zero)
            throw std::invalid_argument("invert_series_vector: phi must vanish to second order at the base point");
    }

    std::vector<MultiSeries<Scalar>> x;
    x.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) x.push_back(MultiSeries<Scalar>::variable(n, jet.order(), j));

    for (int k = 1; k <= K; ++k) {
        for (const auto& [tree, mult] : enumerate_trees(k, n)) {
            const auto val = tree_value_series(tree, jet);
            x[static_cast<std::size_t>(tree.label)] += ScalarTraits<Scalar>::from_int(mult) * val;
        }
    }
    return x;
}

// Residual of the defining identity: (x_j(a) - b_j) - phi_j(x(a)) - u_j,
// all components zero through the truncation order when x solves
// x - phi(x) = a.
template <typename Scalar>
std::vector<MultiSeries<Scalar>> inversion_residual(const FunctionJet<Scalar>& jet,
                                                    const std::vector<MultiSeries<Scalar>>& x) {
    const int n = jet.dimension();
    std::vector<MultiSeries<Scalar>> res;
    res.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        auto r = x[static_cast<std::size_t>(j)] - compose_polynomial(jet.components[static_cast<std::size_t>(j)], x);
        r -= MultiSeries<Scalar>::variable(x.front().nvars(), x.front().max_order(), j);
        res.push_back(std::move(r));
    }
    return res;
}

// Partial sums of x(0) = sum_k (1/k!) d^{k-1}(phi^k)|_base, the series
// solution of x = phi(x) with phi replaced by t*phi, evaluated at t = 1.
// tau_k = [u^{k-1}](phi^k) / k.
template <typename Scalar>
struct FixedPointResult {
    std::vector<Scalar> terms;
    std::vector<Scalar> partial_sums;
    Scalar value = ScalarTraits<Scalar>::zero();
    bool diverging = false;
};

template <typename Scalar>
FixedPointResult<Scalar> fixed_point_value(const FunctionJet<Scalar>& jet, int K) {
    jet.validate();
    if (jet.dimension() != 1) throw std::invalid_argument("fixed_point_value: scalar case only");
    FixedPointResult<Scalar> out;
    Scalar sum = ScalarTraits<Scalar>::zero();
    for (int k = 1; k <= K; ++k) {
        const int work = k - 1;
        // Beyond the jet order phi is padded with zeros (exact for
        // polynomial jets, which is what x = phi(x) is used with here).
        auto phi = jet.scalar_series().extended(work);
        auto p = TruncatedSeries<Scalar>::constant(ScalarTraits<Scalar>::one(), work);
        for (int i = 0; i < k; ++i) p = p * phi;
        const Scalar tau = p[work] / ScalarTraits<Scalar>::from_int(k);
        out.terms.push_back(tau);
        sum += tau;
        out.partial_sums.push_back(sum);
    }
    out.value = sum;
    // Growing tail magnitudes mean the t-series does not converge at t=1.
    const std::size_t m = out.terms.size();
    if (m >= 6) {
        double late = 0.0, mid = 0.0;
        for (std::size_t i = m - 3; i < m; ++i) late = std::max(late, std::abs(ScalarTraits<Scalar>::to_double(out.terms[i])));
        for (std::size_t i = m / 2; i < m / 2 + 3 && i < m; ++i) mid = std::max(mid, std::abs(ScalarTraits<Scalar>::to_double(out.terms[i])));
        out.diverging = late > mid && late > 1e-12;
    }
    return out;
}

} // namespace pslab
