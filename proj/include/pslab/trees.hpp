#pragma once

#include <string>
#include <vector>

namespace pslab {

// Rooted tree with a per-node label (component index for the inversion
// expansion, mode index for the Lindstedt expansion). The canonical form
// sorts each child list by encoding, so pivot-equivalent trees compare
// equal; `multiplicity` counts the plane embeddings of the canonical tree,
//   prod_v  k_v! / prod_c m_c(v)!
// with m_c(v) the sizes of groups of identical child subtrees of v.
struct DecoratedTree {
    int label = 0;
    std::vector<DecoratedTree> children;
};

struct TreeWithMultiplicity {
    DecoratedTree tree;
    long long multiplicity = 1;
};

int node_count(const DecoratedTree& t);
int child_count(const DecoratedTree& t);  // k_v of the root

// Compact canonical encoding, usable as an ordering/equality key.
std::string encode(const DecoratedTree& t);

// Human-readable nested-list form with 1-based labels: (j=1 (j=2) (j=1 (j=1))).
std::string display(const DecoratedTree& t);

DecoratedTree canonicalized(DecoratedTree t);
long long plane_embeddings(const DecoratedTree& t);

// All canonical labeled rooted trees with `nodes` nodes and labels in
// [0, labels), paired with their plane-embedding multiplicities.
// Deterministic order, memoized. Guards: 1 <= nodes <= 8, 1 <= labels <= 8.
std::vector<TreeWithMultiplicity> enumerate_labeled_trees(int nodes, int labels);

} // namespace pslab
