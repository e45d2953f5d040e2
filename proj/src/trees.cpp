#include "pslab/trees.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pslab {

int node_count(const DecoratedTree& t) {
    int n = 1;
    for (const auto& c : t.children) n += node_count(c);
    return n;
}

int child_count(const DecoratedTree& t) { return static_cast<int>(t.children.size()); }

std::string encode(const DecoratedTree& t) {
    std::string s = "(";
    s += std::to_string(t.label);
    for (const auto& c : t.children) s += encode(c);
    s += ")";
    return s;
}

std::string display(const DecoratedTree& t) {
    std::string s = "(j=";
    s += std::to_string(t.label + 1);
    for (const auto& c : t.children) {
        s += ' ';
        s += display(c);
    }
    s += ")";
    return s;
}

DecoratedTree canonicalized(DecoratedTree t) {
    for (auto& c : t.children) c = canonicalized(std::move(c));
    std::sort(t.children.begin(), t.children.end(),
              [](const DecoratedTree& a, const DecoratedTree& b) { return encode(a) < encode(b); });
    return t;
}

long long plane_embeddings(const DecoratedTree& t) {
    long long result = 1;
    // k_v! over the root, divided by the factorials of equal-subtree runs;
    // the interleaved quotients are all integral (multinomial coefficients).
    const int kv = child_count(t);
    for (int i = 2; i <= kv; ++i) result *= i;
    std::vector<std::string> keys;
    keys.reserve(t.children.size());
    for (const auto& c : t.children) keys.push_back(encode(c));
    std::sort(keys.begin(), keys.end());
    std::size_t i = 0;
    while (i < keys.size()) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        for (std::size_t m = 2; m <= j - i; ++m) result /= static_cast<long long>(m);
        i = j;
    }
    for (const auto& c : t.children) result *= plane_embeddings(c);
    return result;
}

namespace {

using TreeList = std::vector<DecoratedTree>;
using Cache = std::map<std::pair<int, int>, TreeList>;

const TreeList& trees_of_size(int nodes, int labels, Cache& cache);

// Child multisets are picked as lexicographically non-increasing sequences
// of (size, pool index), sizes descending first; that makes each multiset
// appear exactly once.
void compose_children(int remaining, int bound_size, std::size_t bound_index, int labels,
                      Cache& cache, std::vector<DecoratedTree>& current, TreeList& shells) {
    if (remaining == 0) {
        DecoratedTree t;
        t.children = current;
        std::sort(t.children.begin(), t.children.end(),
                  [](const DecoratedTree& a, const DecoratedTree& b) { return encode(a) < encode(b); });
        shells.push_back(std::move(t));
        return;
    }
    for (int sz = std::min(remaining, bound_size); sz >= 1; --sz) {
        const TreeList& pool = trees_of_size(sz, labels, cache);
        const std::size_t hi = (sz == bound_size) ? std::min(bound_index, pool.size() - 1) : pool.size() - 1;
        for (std::size_t idx = hi + 1; idx-- > 0;) {
            current.push_back(pool[idx]);
            compose_children(remaining - sz, sz, idx, labels, cache, current, shells);
            current.pop_back();
        }
    }
}

const TreeList& trees_of_size(int nodes, int labels, Cache& cache) {
    auto it = cache.find({nodes, labels});
    if (it != cache.end()) return it->second;

    TreeList result;
    if (nodes == 1) {
        for (int lab = 0; lab < labels; ++lab) {
            DecoratedTree t;
            t.label = lab;
            result.push_back(t);
        }
    } else {
        TreeList shells;
        std::vector<DecoratedTree> current;
        compose_children(nodes - 1, nodes - 1, std::numeric_limits<std::size_t>::max(), labels,
                         cache, current, shells);
        for (int lab = 0; lab < labels; ++lab)
            for (const auto& shell : shells) {
                DecoratedTree t = shell;
                t.label = lab;
                result.push_back(std::move(t));
            }
    }
    return cache.emplace(std::pair<int, int>{nodes, labels}, std::move(result)).first->second;
}

} // namespace

std::vector<TreeWithMultiplicity> enumerate_labeled_trees(int nodes, int labels) {
    if (nodes < 1 || nodes > 8) throw std::invalid_argument("enumerate_labeled_trees: 1 <= nodes <= 8");
    if (labels < 1 || labels > 8) throw std::invalid_argument("enumerate_labeled_trees: 1 <= labels <= 8");
    static std::mutex mu;
    static Cache cache;
    std::lock_guard<std::mutex> lock(mu);
    const TreeList& trees = trees_of_size(nodes, labels, cache);
    std::vector<TreeWithMultiplicity> out;
    out.reserve(trees.size());
    for (const auto& t : trees) out.push_back({t, plane_embeddings(t)});
    return out;
}

} // namespace pslab
