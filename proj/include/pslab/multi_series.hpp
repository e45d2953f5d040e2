#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "pslab/series.hpp"

namespace pslab {

namespace detail {

// Shared monomial table for a (nvars, max total order) pair: exponent
// tuples in graded-lex order plus a dense rank lookup.
struct MonomialTable {
    int nvars = 0;
    int max_order = 0;
    int radix = 0;  // max_order + 1
    std::vector<std::array<std::uint8_t, 4>> exps;
    std::vector<std::int32_t> rank_lookup;  // mixed-radix key -> rank, -1 if absent

    int key_of(const std::array<std::uint8_t, 4>& e) const {
        int key = 0;
        for (int j = nvars - 1; j >= 0; --j) key = key * radix + e[static_cast<std::size_t>(j)];
        return key;
    }
    int rank_of(const std::array<std::uint8_t, 4>& e) const { return rank_lookup[static_cast<std::size_t>(key_of(e))]; }
};

inline std::shared_ptr<const MonomialTable> monomial_table(int nvars, int max_order) {
    if (nvars < 1 || nvars > 4) throw std::invalid_argument("MultiSeries: 1..4 variables supported");
    if (max_order < 0 || max_order > 64) throw std::invalid_argument("MultiSeries: order out of range");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{nvars, max_order}];
    if (slot) return slot;

    auto table = std::make_shared<MonomialTable>();
    table->nvars = nvars;
    table->max_order = max_order;
    table->radix = max_order + 1;
    // Graded enumeration: total degree 0..max_order, lex within a degree.
    std::array<std::uint8_t, 4> e{0, 0, 0, 0};
    for (int total = 0; total <= max_order; ++total) {
        // Enumerate all e with sum == total.
        std::vector<int> cur(static_cast<std::size_t>(nvars), 0);
        // Odometer over compositions of `total` into nvars parts.
        std::function<void(int, int)> rec = [&](int var, int remaining) {
            if (var == nvars - 1) {
                cur[static_cast<std::size_t>(var)] = remaining;
                for (int j = 0; j < nvars; ++j) e[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(cur[static_cast<std::size_t>(j)]);
                table->exps.push_back(e);
                return;
            }
            for (int p = 0; p <= remaining; ++p) {
                cur[static_cast<std::size_t>(var)] = p;
                rec(var + 1, remaining - p);
            }
        };
        rec(0, total);
    }
    int span = 1;
    for (int j = 0; j < nvars; ++j) span *= table->radix;
    table->rank_lookup.assign(static_cast<std::size_t>(span), -1);
    for (std::size_t r = 0; r < table->exps.size(); ++r)
        table->rank_lookup[static_cast<std::size_t>(table->key_of(table->exps[r]))] = static_cast<std::int32_t>(r);
    slot = table;
    return table;
}

} // namespace detail

// Truncated multivariate Taylor series in up to 4 variables, coefficients
// indexed by total degree <= max_order. Products truncate at max_order;
// coefficients of retained degrees are exact (graded algebra).
template <typename Scalar>
class MultiSeries {
public:
    MultiSeries() : MultiSeries(1, 0) {}

    MultiSeries(int nvars, int max_order)
        : table_(detail::monomial_table(nvars, max_order)),
          c_(table_->exps.size(), ScalarTraits<Scalar>::zero()) {}

    static MultiSeries constant(int nvars, int max_order, const Scalar& v) {
        MultiSeries s(nvars, max_order);
        s.c_[0] = v;
        return s;
    }
    // The displacement variable u_j.
    static MultiSeries variable(int nvars, int max_order, int var) {
        if (max_order < 1) throw std::invalid_argument("MultiSeries::variable: order >= 1 required");
        MultiSeries s(nvars, max_order);
        std::array<std::uint8_t, 4> e{0, 0, 0, 0};
        e[static_cast<std::size_t>(var)] = 1;
        s.c_[static_cast<std::size_t>(s.table_->rank_of(e))] = ScalarTraits<Scalar>::one();
        return s;
    }

    int nvars() const { return table_->nvars; }
    int max_order() const { return table_->max_order; }
    std::size_t term_count() const { return c_.size(); }

    const Scalar& operator[](std::size_t rank) const { return c_[rank]; }
    Scalar& operator[](std::size_t rank) { return c_[rank]; }

    const std::array<std::uint8_t, 4>& exponents(std::size_t rank) const { return table_->exps[rank]; }

    Scalar coefficient(const std::array<std::uint8_t, 4>& e) const {
        for (int j = 0; j < 4; ++j)
            if (e[static_cast<std::size_t>(j)] != 0 && j >= nvars()) return ScalarTraits<Scalar>::zero();
        int total = 0;
        for (int j = 0; j < nvars(); ++j) total += e[static_cast<std::size_t>(j)];
        if (total > max_order()) return ScalarTraits<Scalar>::zero();
        return c_[static_cast<std::size_t>(table_->rank_of(e))];
    }

    void set_coefficient(const std::array<std::uint8_t, 4>& e, const Scalar& v) {
        c_[static_cast<std::size_t>(table_->rank_of(e))] = v;
    }

    const Scalar& value_at_zero() const { return c_[0]; }

    bool is_zero() const {
        for (const auto& v : c_)
            if (!ScalarTraits<Scalar>::is_zero(v)) return false;
        return true;
    }

    MultiSeries& operator+=(const MultiSeries& o) {
        check_compatible(o);
        for (std::size_t r = 0; r < c_.size(); ++r) c_[r] += o.c_[r];
        return *this;
    }
    MultiSeries& operator-=(const MultiSeries& o) {
        check_compatible(o);
        for (std::size_t r = 0; r < c_.size(); ++r) c_[r] -= o.c_[r];
        return *this;
    }
    friend MultiSeries operator+(MultiSeries a, const MultiSeries& b) { return a += b; }
    friend MultiSeries operator-(MultiSeries a, const MultiSeries& b) { return a -= b; }
    friend MultiSeries operator-(MultiSeries a) {
        for (auto& v : a.c_) v = -v;
        return a;
    }
    friend MultiSeries operator*(const Scalar& s, MultiSeries a) {
        for (auto& v : a.c_) v = s * v;
        return a;
    }

    friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
        a.check_compatible(b);
        const auto& tab = *a.table_;
        MultiSeries r(a.nvars(), a.max_order());
        std::vector<std::size_t> nza, nzb;
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            if (!ScalarTraits<Scalar>::is_zero(a.c_[i])) nza.push_back(i);
        for (std::size_t i = 0; i < b.c_.size(); ++i)
            if (!ScalarTraits<Scalar>::is_zero(b.c_[i])) nzb.push_back(i);
        for (std::size_t ia : nza) {
            const auto& ea = tab.exps[ia];
            int ta = 0;
            for (int j = 0; j < tab.nvars; ++j) ta += ea[static_cast<std::size_t>(j)];
            for (std::size_t ib : nzb) {
                const auto& eb = tab.exps[ib];
                int tb = ta;
                for (int j = 0; j < tab.nvars; ++j) tb += eb[static_cast<std::size_t>(j)];
                if (tb > tab.max_order) continue;
                std::array<std::uint8_t, 4> e{0, 0, 0, 0};
                for (int j = 0; j < tab.nvars; ++j)
                    e[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(ea[static_cast<std::size_t>(j)] + eb[static_cast<std::size_t>(j)]);
                r.c_[static_cast<std::size_t>(tab.rank_of(e))] += a.c_[ia] * b.c_[ib];
            }
        }
        return r;
    }

    bool operator==(const MultiSeries& o) const {
        check_compatible(o);
        for (std::size_t r = 0; r < c_.size(); ++r)
            if (!(c_[r] == o.c_[r])) return false;
        return true;
    }

    // d/du_var, exact (degree only drops).
    friend MultiSeries derivative(const MultiSeries& a, int var) {
        const auto& tab = *a.table_;
        MultiSeries r(a.nvars(), a.max_order());
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (ScalarTraits<Scalar>::is_zero(a.c_[i])) continue;
            auto e = tab.exps[i];
            const int p = e[static_cast<std::size_t>(var)];
            if (p == 0) continue;
            e[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(p - 1);
            r.c_[static_cast<std::size_t>(tab.rank_of(e))] += ScalarTraits<Scalar>::from_int(p) * a.c_[i];
        }
        return r;
    }

    // Coefficient slice of var^power, with that variable's exponent removed.
    friend MultiSeries extract_power(const MultiSeries& a, int var, int power) {
        const auto& tab = *a.table_;
        MultiSeries r(a.nvars(), a.max_order());
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            if (ScalarTraits<Scalar>::is_zero(a.c_[i])) continue;
            auto e = tab.exps[i];
            if (e[static_cast<std::size_t>(var)] != power) continue;
            e[static_cast<std::size_t>(var)] = 0;
            r.c_[static_cast<std::size_t>(tab.rank_of(e))] += a.c_[i];
        }
        return r;
    }

    // Re-embed into a table with more variables and/or a different order cap.
    MultiSeries embedded(int new_nvars, int new_order) const {
        if (new_nvars < nvars()) throw std::invalid_argument("MultiSeries::embedded: cannot drop variables");
        MultiSeries r(new_nvars, new_order);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            if (ScalarTraits<Scalar>::is_zero(c_[i])) continue;
            const auto& e = table_->exps[i];
            int total = 0;
            for (int j = 0; j < nvars(); ++j) total += e[static_cast<std::size_t>(j)];
            if (total > new_order) continue;
            r.c_[static_cast<std::size_t>(r.table_->rank_of(e))] = c_[i];
        }
        return r;
    }

    // Truncate to a smaller total order (same variable count).
    MultiSeries truncated(int new_order) const {
        MultiSeries r(nvars(), new_order);
        for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = c_[i];  // shared graded-lex prefix
        return r;
    }

private:
    void check_compatible(const MultiSeries& o) const {
        if (table_ != o.table_ && (nvars() != o.nvars() || max_order() != o.max_order()))
            throw std::invalid_argument("MultiSeries: incompatible shapes");
    }

    std::shared_ptr<const detail::MonomialTable> table_;
    std::vector<Scalar> c_;
};

// Evaluate the polynomial sum_e c_e * prod_j args[j]^(e_j) in truncated
// arithmetic; args must share a table (typically displacements with zero
// constant term so that truncation respects the grading).
template <typename Scalar>
MultiSeries<Scalar> compose_polynomial(const MultiSeries<Scalar>& poly,
                                       const std::vector<MultiSeries<Scalar>>& args) {
    if (static_cast<int>(args.size()) != poly.nvars())
        throw std::invalid_argument("compose_polynomial: argument count mismatch");
    const int out_vars = args.front().nvars();
    const int out_order = args.front().max_order();

    // Highest power of each variable actually present.
    std::array<int, 4> max_pow{0, 0, 0, 0};
    for (std::size_t i = 0; i < poly.term_count(); ++i) {
        if (ScalarTraits<Scalar>::is_zero(poly[i])) continue;
        const auto& e = poly.exponents(i);
        for (int j = 0; j < poly.nvars(); ++j)
            max_pow[static_cast<std::size_t>(j)] = std::max(max_pow[static_cast<std::size_t>(j)], static_cast<int>(e[static_cast<std::size_t>(j)]));
    }
    std::array<std::vector<MultiSeries<Scalar>>, 4> powers;
    for (int j = 0; j < poly.nvars(); ++j) {
        auto& pw = powers[static_cast<std::size_t>(j)];
        pw.push_back(MultiSeries<Scalar>::constant(out_vars, out_order, ScalarTraits<Scalar>::one()));
        for (int p = 1; p <= max_pow[static_cast<std::size_t>(j)]; ++p)
            pw.push_back(pw.back() * args[static_cast<std::size_t>(j)]);
    }

    MultiSeries<Scalar> acc(out_vars, out_order);
    for (std::size_t i = 0; i < poly.term_count(); ++i) {
        if (ScalarTraits<Scalar>::is_zero(poly[i])) continue;
        const auto& e = poly.exponents(i);
        MultiSeries<Scalar> term = powers[0][static_cast<std::size_t>(e[0])];
        for (int j = 1; j < poly.nvars(); ++j)
            term = term * powers[static_cast<std::size_t>(j)][static_cast<std::size_t>(e[static_cast<std::size_t>(j)])];
        acc += poly[i] * term;
    }
    return acc;
}

// 1-variable bridge to TruncatedSeries.
template <typename Scalar>
TruncatedSeries<Scalar> to_univariate(const MultiSeries<Scalar>& a) {
    if (a.nvars() != 1) throw std::invalid_argument("to_univariate: needs a 1-variable series");
    auto r = TruncatedSeries<Scalar>::zero(a.max_order());
    for (int k = 0; k <= a.max_order(); ++k) {
        std::array<std::uint8_t, 4> e{static_cast<std::uint8_t>(k), 0, 0, 0};
        r[k] = a.coefficient(e);
    }
    return r;
}

template <typename Scalar>
MultiSeries<Scalar> from_univariate(const TruncatedSeries<Scalar>& a) {
    MultiSeries<Scalar> r(1, a.order());
    for (int k = 0; k <= a.order(); ++k) {
        std::array<std::uint8_t, 4> e{static_cast<std::uint8_t>(k), 0, 0, 0};
        r.set_coefficient(e, a[k]);
    }
    return r;
}

} // namespace pslab
