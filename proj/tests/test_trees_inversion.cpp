#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "pslab/inversion.hpp"
#include "pslab/trees.hpp"

using namespace pslab;

namespace {

// Independent shape oracle: every parent-pointer array (parent(i) < i)
// describes a rooted tree on k nodes; canonicalize and dedupe.
std::set<std::string> brute_force_shapes(int k, int labels) {
    std::set<std::string> shapes;
    std::vector<int> parent(static_cast<std::size_t>(k), 0);
    std::vector<int> label(static_cast<std::size_t>(k), 0);
    std::function<void(int)> assign_labels = [&](int i) {
        if (i == k) {
            std::vector<DecoratedTree> nodes(static_cast<std::size_t>(k));
            for (int v = 0; v < k; ++v) nodes[static_cast<std::size_t>(v)].label = label[static_cast<std::size_t>(v)];
            for (int v = k - 1; v >= 1; --v)
                nodes[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])].children.push_back(
                    nodes[static_cast<std::size_t>(v)]);
            shapes.insert(encode(canonicalized(nodes[0])));
            return;
        }
        for (int l = 0; l < labels; ++l) {
            label[static_cast<std::size_t>(i)] = l;
            assign_labels(i + 1);
        }
    };
    std::function<void(int)> assign_parents = [&](int i) {
        if (i == k) {
            assign_labels(0);
            return;
        }
        for (int p = 0; p < i; ++p) {
            parent[static_cast<std::size_t>(i)] = p;
            assign_parents(i + 1);
        }
    };
    assign_parents(1);
    return shapes;
}

FunctionJet<Rational> scalar_poly(std::initializer_list<long long> coeffs, int order) {
    std::vector<Rational> c;
    for (long long v : coeffs) c.emplace_back(v);
    c.resize(static_cast<std::size_t>(order) + 1, Rational(0));
    return FunctionJet<Rational>::scalar(TruncatedSeries<Rational>(std::move(c)));
}

} // namespace

TEST_CASE("unlabeled tree counts match A000081 and the brute-force oracle") {
    const int expected[] = {1, 1, 2, 4, 9, 20, 48, 115};
    for (int k = 1; k <= 6; ++k) {
        const auto trees = enumerate_trees(k, 1);
        CHECK(static_cast<int>(trees.size()) == expected[k - 1]);
        const auto oracle = brute_force_shapes(k, 1);
        CHECK(oracle.size() == trees.size());
        std::set<std::string> mine;
        for (const auto& [t, mult] : trees) mine.insert(encode(t));
        CHECK(mine == oracle);
    }
    CHECK(enumerate_trees(7, 1).size() == 48);
    CHECK(enumerate_trees(8, 1).size() == 115);
}

TEST_CASE("labeled tree enumeration matches the brute-force oracle") {
    for (int k = 1; k <= 5; ++k) {
        for (int n = 1; n <= 2; ++n) {
            const auto trees = enumerate_trees(k, n);
            const auto oracle = brute_force_shapes(k, n);
            std::set<std::string> mine;
            for (const auto& [t, mult] : trees) mine.insert(encode(t));
            CHECK(mine == oracle);
        }
    }
}

TEST_CASE("multiplicities sum to the plane-tree count") {
    // Sum over canonical trees of plane embeddings = n^k * Catalan(k-1).
    const long long catalan[] = {1, 1, 2, 5, 14, 42, 132, 429};
    for (int n = 1; n <= 3; ++n) {
        for (int k = 1; k <= 6; ++k) {
            long long total = 0;
            for (const auto& [t, mult] : enumerate_trees(k, n)) total += mult;
            long long expected = catalan[k - 1];
            for (int i = 0; i < k; ++i) expected *= n;
            CHECK(total == expected);
        }
    }
}

TEST_CASE("tree guards") {
    CHECK_THROWS_AS(enumerate_trees(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_trees(9, 1), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_trees(3, 4), std::invalid_argument);
}

TEST_CASE("tree display uses the nested-list form") {
    DecoratedTree chain;
    chain.label = 0;
    DecoratedTree child;
    child.label = 1;
    DecoratedTree grand;
    grand.label = 0;
    child.children.push_back(grand);
    chain.children.push_back(child);
    CHECK(display(chain) == "(j=1 (j=2 (j=1)))");
}

TEST_CASE("tree value is invariant under child reordering") {
    // phi(x) = 1 + 2x + 3x^2/... arbitrary jet; tree with two distinct children.
    const auto jet = scalar_poly({1, 2, 3, 4}, 8);
    DecoratedTree a, c1, c2, c21;
    a.label = 0;
    c1.label = 0;
    c21.label = 0;
    c2.label = 0;
    c2.children.push_back(c21);
    a.children = {c1, c2};
    DecoratedTree b = a;
    std::swap(b.children[0], b.children[1]);
    CHECK(tree_value_series(a, jet) == tree_value_series(b, jet));
}

TEST_CASE("tree value basics") {
    // single node, phi = x^2 at 0: value phi(0) = 0
    const auto xsq = scalar_poly({0, 0, 1}, 6);
    DecoratedTree single;
    CHECK(tree_value(single, xsq) == Rational(0));

    // single node, phi = c
    const auto c = scalar_poly({7}, 4);
    CHECK(tree_value(single, c) == Rational(7));

    // 2-chain with phi = x^2 around a generic base point b: phi'(b) phi(b) = 2b * b^2.
    // Jet of x^2 around b = 3: (9, 6, 1).
    const auto shifted = scalar_poly({9, 6, 1}, 6);
    DecoratedTree chain;
    DecoratedTree leaf;
    chain.children.push_back(leaf);
    CHECK(tree_value(chain, shifted) == Rational(6 * 9));
}

TEST_CASE("lagrange_term basics") {
    // psi = identity, phi = x^2, k = 1 -> the term is phi itself: alpha^2.
    const auto xsq = scalar_poly({0, 0, 1}, 6);
    const auto psi = FunctionJet<Rational>::scalar(TruncatedSeries<Rational>::identity(6));
    const auto t1 = lagrange_term(1, xsq, psi);
    CHECK(t1[2] == Rational(1));
    CHECK(t1[0] == Rational(0));
    CHECK(t1[1] == Rational(0));

    // phi = 0: every term vanishes.
    const auto zero = scalar_poly({0}, 6);
    for (int k = 1; k <= 4; ++k) {
        const auto t = lagrange_term(k, zero, psi);
        for (int i = 0; i <= t.order(); ++i) CHECK(t[i] == Rational(0));
    }

    CHECK_THROWS_AS(lagrange_term(7, scalar_poly({0, 0, 1}, 5), psi), std::invalid_argument);
}

TEST_CASE("invert x - x^2 gives the Catalan numbers") {
    const auto xsq = scalar_poly({0, 0, 1}, 12);
    const auto x = invert_series(xsq, 11);
    const long long catalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862};
    CHECK(x[0] == Rational(0));
    for (int k = 1; k <= 10; ++k) CHECK(x[k] == Rational(catalan[k - 1]));
}

TEST_CASE("inversion composition identity holds through the truncation order") {
    // phi = x^2 + 2x^3 (valuation 2), scalar route, then check x - phi(x) = alpha.
    const auto phi = scalar_poly({0, 0, 1, 2}, 10);
    const int K = 9;
    const auto x = invert_series(phi, K);
    // alpha(x) = x - phi(x) as a series, composed with x(alpha).
    auto alpha_of_x = TruncatedSeries<Rational>::identity(K) - phi.scalar_series().truncated(K);
    const auto should_be_identity = series_compose(alpha_of_x, x);
    for (int k = 0; k <= K; ++k)
        CHECK(should_be_identity[k] == (k == 1 ? Rational(1) : Rational(0)));
}

TEST_CASE("invert_series requires a second-order zero") {
    CHECK_THROWS_AS(invert_series(scalar_poly({0, 1, 1}, 6), 5), std::invalid_argument);
    CHECK_THROWS_AS(invert_series(scalar_poly({1, 0, 1}, 6), 5), std::invalid_argument);
    // phi = 0 inverts to the identity.
    const auto x = invert_series(scalar_poly({0}, 6), 5);
    CHECK(x[1] == Rational(1));
    for (int k : {0, 2, 3, 4, 5}) CHECK(x[k] == Rational(0));
}

TEST_CASE("scalar tree expansion reproduces the direct derivative term") {
    // 20 pseudo-random small rational jets; exact identity per order.
    std::mt19937 rng(20240517u);
    std::uniform_int_distribution<int> num(-4, 4);
    const auto psi = FunctionJet<Rational>::scalar(TruncatedSeries<Rational>::identity(40));
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<Rational> cs;
        for (int d = 0; d <= 4; ++d) cs.emplace_back(Rational(num(rng), 1 + trial % 3));
        TruncatedSeries<Rational> phi_series(cs);
        const auto jet = FunctionJet<Rational>::scalar(phi_series.extended(40));
        for (int k = 1; k <= 6; ++k) {
            const auto direct = lagrange_term(k, jet, psi);
            auto tree_sum = MultiSeries<Rational>(1, jet.order());
            for (const auto& [t, mult] : enumerate_trees(k, 1))
                tree_sum += Rational(mult) * tree_value_series(t, jet);
            const auto tree_series = to_univariate(tree_sum);
            for (int i = 0; i <= 30; ++i) CHECK(tree_series[i] == direct[i]);
        }
    }
}

TEST_CASE("vector tree expansion matches the fixed-point iteration oracle") {
    // x = alpha + t phi(x) iterated in exact multivariate arithmetic
    // (variables u1, u2, t) against the tree sum per t-order.
    std::mt19937 rng(987654u);
    std::uniform_int_distribution<int> num(-3, 3);
    const int n = 2;
    const int kmax = 4;
    const int udeg = 6;
    const int P = kmax + udeg;

    for (int trial = 0; trial < 8; ++trial) {
        // Random quadratic jets phi_j with zero constant/linear parts are not
        // required for the identity; keep general low-order parts small.
        FunctionJet<Rational> jet;
        jet.base = {Rational(0), Rational(0)};
        for (int j = 0; j < n; ++j) {
            MultiSeries<Rational> comp(n, P);
            for (std::size_t r = 0; r < comp.term_count(); ++r) {
                const auto& e = comp.exponents(r);
                const int total = e[0] + e[1];
                if (total > 2) continue;
                comp[r] = Rational(num(rng), 1 + (trial + j) % 2);
            }
            jet.components.push_back(comp);
        }

        // Oracle: iterate in (u1, u2, t); the embedded jets carry a third
        // variable that never appears, fed with a dummy argument.
        std::vector<MultiSeries<Rational>> X;
        for (int j = 0; j < n; ++j) X.push_back(MultiSeries<Rational>::variable(3, P, j));
        const auto t_var = MultiSeries<Rational>::variable(3, P, 2);
        std::vector<MultiSeries<Rational>> phi3;
        for (int j = 0; j < n; ++j) phi3.push_back(jet.components[static_cast<std::size_t>(j)].embedded(3, P));
        for (int it = 0; it <= kmax; ++it) {
            std::vector<MultiSeries<Rational>> args = X;
            args.push_back(MultiSeries<Rational>(3, P));
            std::vector<MultiSeries<Rational>> next;
            for (int j = 0; j < n; ++j) {
                auto val = compose_polynomial(phi3[static_cast<std::size_t>(j)], args);
                next.push_back(MultiSeries<Rational>::variable(3, P, j) + t_var * val);
            }
            X = std::move(next);
        }

        for (int k = 1; k <= kmax; ++k) {
            std::vector<MultiSeries<Rational>> tree_sum(static_cast<std::size_t>(n), MultiSeries<Rational>(n, P));
            for (const auto& [t, mult] : enumerate_trees(k, n))
                tree_sum[static_cast<std::size_t>(t.label)] += Rational(mult) * tree_value_series(t, jet);
            for (int j = 0; j < n; ++j) {
                const auto oracle_k = extract_power(X[static_cast<std::size_t>(j)], 2, k);
                // Compare through total u-degree P - k (exact region of the oracle).
                for (std::size_t r = 0; r < oracle_k.term_count(); ++r) {
                    const auto& e = oracle_k.exponents(r);
                    if (e[2] != 0 || e[0] + e[1] > P - k) continue;
                    std::array<std::uint8_t, 4> eu{e[0], e[1], 0, 0};
                    CHECK(oracle_k[r] == tree_sum[static_cast<std::size_t>(j)].coefficient(eu));
                }
            }
        }
    }
}

TEST_CASE("multivariate truncation keeps the graded prefix") {
    MultiSeries<Rational> a(2, 6);
    a.set_coefficient({1, 2, 0, 0}, Rational(5));
    a.set_coefficient({3, 3, 0, 0}, Rational(7));
    const auto t = a.truncated(4);
    CHECK(t.max_order() == 4);
    CHECK(t.coefficient({1, 2, 0, 0}) == Rational(5));
    CHECK(t.coefficient({3, 3, 0, 0}) == Rational(0));  // beyond the cap
    const auto sq_then_cut = (a * a).truncated(4);
    const auto cut_then_sq = t * t;
    CHECK(sq_then_cut == cut_then_sq);
}

TEST_CASE("invert_series_vector solves the vector inversion") {
    // phi_1 = u1^2 + u1 u2, phi_2 = u2^2 (valuation 2): residual vanishes.
    const int n = 2, K = 6;
    FunctionJet<Rational> jet;
    jet.base = {Rational(0), Rational(0)};
    for (int j = 0; j < n; ++j) jet.components.push_back(MultiSeries<Rational>(n, K));
    jet.components[0].set_coefficient({2, 0, 0, 0}, Rational(1));
    jet.components[0].set_coefficient({1, 1, 0, 0}, Rational(1));
    jet.components[1].set_coefficient({0, 2, 0, 0}, Rational(1));

    const auto x = invert_series_vector(jet, K);
    const auto res = inversion_residual(jet, x);
    for (int j = 0; j < n; ++j) CHECK(res[static_cast<std::size_t>(j)].is_zero());
}

TEST_CASE("fixed point of x = (x^2+1)/4 converges to the smaller root") {
    // terms from jet around 0; root 2 - sqrt(3).
    std::vector<Rational> c{Rational(1, 4), Rational(0), Rational(1, 4)};
    const auto jet = FunctionJet<Rational>::scalar(TruncatedSeries<Rational>(c));
    const auto fp = fixed_point_value(jet, 24);
    CHECK_FALSE(fp.diverging);
    const double root = 2.0 - std::sqrt(3.0);
    CHECK(fp.value.to_double() == doctest::Approx(root).epsilon(1e-9));

    // constant phi: x = c exactly at k = 1, all higher terms vanish.
    const auto cjet = FunctionJet<Rational>::scalar(TruncatedSeries<Rational>(std::vector<Rational>{Rational(3, 100), Rational(0)}));
    const auto cfp = fixed_point_value(cjet, 6);
    CHECK(cfp.terms[0] == Rational(3, 100));
    for (std::size_t i = 1; i < cfp.terms.size(); ++i) CHECK(cfp.terms[i] == Rational(0));

    // phi = x^2 + 5 has no real fixed point: flagged divergent.
    std::vector<Rational> d{Rational(5), Rational(0), Rational(1)};
    const auto djet = FunctionJet<Rational>::scalar(TruncatedSeries<Rational>(d));
    const auto dfp = fixed_point_value(djet, 18);
    CHECK(dfp.diverging);
}
