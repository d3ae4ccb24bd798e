#include "wcoj/plan.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace wcoj {

namespace {

int count_nodes(const PlanNode* u) {
    if (!u) return 0;
    return 1 + count_nodes(u->lc.get()) + count_nodes(u->rc.get());
}

std::unique_ptr<PlanNode> build(const std::vector<AttrSet>& e, AttrSet u, int k) {
    bool anyHit = false;
    for (int i = 0; i < k; ++i)
        if (e[i].intersects(u)) { anyHit = true; break; }
    if (!anyHit) return nullptr;

    auto node = std::make_unique<PlanNode>();
    node->label = k;
    node->univ = u;

    bool someNotContaining = false;
    for (int i = 0; i < k; ++i)
        if (!u.subsetOf(e[i])) { someNotContaining = true; break; }
    if (k > 1 && someNotContaining) {
        node->lc = build(e, u - e[k - 1], k - 1);
        node->rc = build(e, u & e[k - 1], k - 1);
    }
    return node;
}

// Leftover attributes (in scope of no deeper edge) are emitted right after the
// surviving child's block so the order still covers all of univ(u).
void print_attribs(const PlanNode* u, std::vector<AttrId>& out) {
    if (u->isLeaf()) {
        for (AttrId a : u->univ.toVector()) out.push_back(a);
    } else if (!u->lc) {
        print_attribs(u->rc.get(), out);
        for (AttrId a : (u->univ - u->rc->univ).toVector()) out.push_back(a);
    } else if (!u->rc) {
        print_attribs(u->lc.get(), out);
        for (AttrId a : (u->univ - u->lc->univ).toVector()) out.push_back(a);
    } else {
        print_attribs(u->lc.get(), out);
        print_attribs(u->rc.get(), out);
    }
}

bool block_contiguous(const PlanNode* u, const TotalOrder& to) {
    if (!u) return true;
    auto attrs = u->univ.toVector();
    int lo = to.pos.size(), hi = -1;
    for (AttrId a : attrs) {
        lo = std::min(lo, to.pos[a]);
        hi = std::max(hi, to.pos[a]);
    }
    if (hi - lo + 1 != static_cast<int>(attrs.size())) return false;
    return block_contiguous(u->lc.get(), to) && block_contiguous(u->rc.get(), to);
}

bool check_to2(const JoinQuery& q, const std::vector<int>& order, const PlanNode* u,
               const TotalOrder& to) {
    if (!u) return true;
    if (u->lc && u->rc) {
        AttrSet ek = q.edges[order[u->label - 1]];
        // attrs preceding univ(rc) == attrs preceding univ(u) | (univ \ e_k)
        int rcLo = static_cast<int>(to.order.size());
        for (AttrId a : u->rc->univ.toVector()) rcLo = std::min(rcLo, to.pos[a]);
        int uLo = static_cast<int>(to.order.size());
        for (AttrId a : u->univ.toVector()) uLo = std::min(uLo, to.pos[a]);

        AttrSet precedingRc, precedingU;
        for (int i = 0; i < rcLo; ++i) precedingRc.add(to.order[i]);
        for (int i = 0; i < uLo; ++i) precedingU.add(to.order[i]);
        if (precedingRc != (precedingU | (u->univ - ek))) return false;
    }
    return check_to2(q, order, u->lc.get(), to) && check_to2(q, order, u->rc.get(), to);
}

void tree_lines(const JoinQuery& q, const PlanNode* u, int depth, bool ascii,
                std::ostringstream& out) {
    if (!u) return;
    if (ascii)
        out << std::string(static_cast<size_t>(depth) * 2, ' ');
    else
        out << depth << " ";
    out << "k=" << u->label << " univ=" << attrSetToString(q, u->univ)
        << (u->isLeaf() ? " leaf" : "") << "\n";
    tree_lines(q, u->lc.get(), depth + 1, ascii, out);
    tree_lines(q, u->rc.get(), depth + 1, ascii, out);
}

}  // namespace

int QpTree::nodeCount() const { return count_nodes(root.get()); }

QpTree build_qp_tree(const JoinQuery& q, std::vector<int> edgeOrder) {
    q.validate();
    if (edgeOrder.empty()) {
        edgeOrder.resize(q.numEdges());
        std::iota(edgeOrder.begin(), edgeOrder.end(), 0);
    }
    std::vector<int> sorted = edgeOrder;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < q.numEdges(); ++i)
        if (sorted[i] != i) throw SchemaError("edgeOrder is not a permutation of the edges");

    std::vector<AttrSet> e(edgeOrder.size());
    for (size_t i = 0; i < edgeOrder.size(); ++i) e[i] = q.edges[edgeOrder[i]];

    QpTree t;
    t.edgeOrder = std::move(edgeOrder);
    t.root = build(e, q.universe(), q.numEdges());
    return t;
}

TotalOrder total_order(const JoinQuery& q, const QpTree& t) {
    TotalOrder to;
    print_attribs(t.root.get(), to.order);
    to.pos.assign(q.numAttrs(), -1);
    for (size_t i = 0; i < to.order.size(); ++i) to.pos[to.order[i]] = static_cast<int>(i);
    for (int p : to.pos)
        if (p < 0) throw ContractViolation("total_order: attribute missing from print-attribs");
    return to;
}

bool order_has_contiguous_blocks(const QpTree& t, const TotalOrder& to) {
    return block_contiguous(t.root.get(), to);
}

bool order_splits_consistently(const JoinQuery& q, const QpTree& t, const TotalOrder& to) {
    return check_to2(q, t.edgeOrder, t.root.get(), to);
}

std::string tree_to_string(const JoinQuery& q, const QpTree& t) {
    std::ostringstream out;
    tree_lines(q, t.root.get(), 0, false, out);
    return out.str();
}

std::string tree_to_ascii(const JoinQuery& q, const QpTree& t) {
    std::ostringstream out;
    tree_lines(q, t.root.get(), 0, true, out);
    return out.str();
}

}  // namespace wcoj
