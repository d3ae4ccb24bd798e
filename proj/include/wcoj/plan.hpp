#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wcoj/query.hpp"

namespace wcoj {

// Query plan tree node. label is the 1-based anchor position k into the fixed
// edge order; a node with no children is a leaf.
struct PlanNode {
    int label = 0;
    AttrSet univ;
    std::unique_ptr<PlanNode> lc, rc;

    bool isLeaf() const { return !lc && !rc; }
};

struct QpTree {
    std::unique_ptr<PlanNode> root;
    std::vector<int> edgeOrder;  // edgeOrder[pos] = original edge index of e_{pos+1}

    int nodeCount() const;
};

// build-tree(V, m) over the given edge permutation (defaults to input order).
QpTree build_qp_tree(const JoinQuery& q, std::vector<int> edgeOrder = {});

struct TotalOrder {
    std::vector<AttrId> order;  // permutation of V
    std::vector<int> pos;       // inverse: pos[attr] = rank

    int rank(AttrId a) const { return pos[a]; }
};

// print-attribs with ascending-id tie-break inside each block.
TotalOrder total_order(const JoinQuery& q, const QpTree& t);

// Every node's universe is a contiguous block of the order.
bool order_has_contiguous_blocks(const QpTree& t, const TotalOrder& to);
// For every internal u with both children, the attributes preceding univ(rc)
// are exactly (attributes preceding univ(u)) union (univ \ e_k).
bool order_splits_consistently(const JoinQuery& q, const QpTree& t, const TotalOrder& to);

std::string tree_to_string(const JoinQuery& q, const QpTree& t);   // one node per line
std::string tree_to_ascii(const JoinQuery& q, const QpTree& t);    // indented art

}  // namespace wcoj
