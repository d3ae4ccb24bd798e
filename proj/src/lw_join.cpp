#include "wcoj/lw_join.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace wcoj {

namespace {

// Rows of a relation grouped by their projection onto `key` (ascending-id
// column order), as sorted flat storage. Used for sections and joins below.
struct Grouped {
    std::vector<AttrId> keyCols;   // schema positions of the key
    std::vector<AttrId> restCols;  // remaining positions
    const Relation* rel;

    Grouped(const Relation& r, AttrSet key) : rel(&r) {
        for (size_t i = 0; i < r.schema().size(); ++i) {
            if (key.contains(r.schema()[i]))
                keyCols.push_back(static_cast<AttrId>(i));
            else
                restCols.push_back(static_cast<AttrId>(i));
        }
    }
};

std::vector<Value> pick(std::span<const Value> row, const std::vector<AttrId>& cols) {
    std::vector<Value> out;
    out.reserve(cols.size());
    for (AttrId c : cols) out.push_back(row[static_cast<size_t>(c)]);
    return out;
}

using KeyMap = std::map<std::vector<Value>, std::vector<std::uint32_t>>;

KeyMap group_by(const Relation& r, AttrSet key, WorkCounter* wc) {
    Grouped g(r, key);
    KeyMap m;
    for (std::uint32_t i = 0; i < r.size(); ++i) {
        if (wc) wc->step();
        m[pick(r.row(i), g.keyCols)].push_back(i);
    }
    return m;
}

}  // namespace

bool is_lw_instance(const JoinQuery& q) {
    const int n = q.numAttrs();
    if (n < 2 || q.numEdges() != n) return false;
    std::vector<AttrSet> want;
    for (int i = 0; i < n; ++i) {
        AttrSet e = q.universe();
        e.remove(i);
        want.push_back(e);
    }
    std::vector<AttrSet> have = q.edges;
    auto bySet = [](AttrSet a, AttrSet b) { return a < b; };
    std::sort(want.begin(), want.end(), bySet);
    std::sort(have.begin(), have.end(), bySet);
    return want == have;
}

namespace {

struct ShapeNode {
    AttrSet label;
    int leafAttr = -1;  // >= 0 at leaves
    std::unique_ptr<ShapeNode> lc, rc;
    int leafCount = 0;
};

// Balanced binary tree over V in ascending id order; label(x) = V \ {x} at
// leaves, intersection of children's labels inside.
std::unique_ptr<ShapeNode> build_shape(const std::vector<AttrId>& leaves, size_t lo, size_t hi,
                                       AttrSet universe) {
    auto node = std::make_unique<ShapeNode>();
    if (hi - lo == 1) {
        node->leafAttr = leaves[lo];
        node->label = universe;
        node->label.remove(leaves[lo]);
        node->leafCount = 1;
        return node;
    }
    size_t mid = (lo + hi) / 2;
    node->lc = build_shape(leaves, lo, mid, universe);
    node->rc = build_shape(leaves, mid, hi, universe);
    node->label = node->lc->label & node->rc->label;
    node->leafCount = node->lc->leafCount + node->rc->leafCount;
    return node;
}

struct LwCtx {
    const JoinQuery& q;
    const LwOptions& opt;
    double sizeBoundP;  // (prod N_e)^(1/(n-1))
    WorkCounter wc;
    std::unordered_map<std::uint64_t, int> edgeOfLabel;  // AttrSet raw -> edge idx
};

struct CD {
    Relation c;  // candidate tuples over V
    Relation d;  // deferred projection superset over label(x)
};

void check_properties(LwCtx& ctx, const ShapeNode* x, const CD& cd) {
    if (!ctx.opt.checkProperties) return;
    const double P = ctx.sizeBoundP;
    const int leaves = x->leafCount;
    // (2) |C| <= (leaves - 1) * P
    if (static_cast<double>(cd.c.size()) > (leaves - 1) * P * (1 + 1e-9) + 1e-9)
        throw ContractViolation("lw property (2) violated");
    // (3) |D| <= min(min-leaf N, prod leaf N / P^{leaves-1})
    double prodLeaf = 1.0;
    double minLeaf = std::numeric_limits<double>::infinity();
    std::vector<AttrId> leafAttrs;
    auto collect = [&](auto&& self, const ShapeNode* n) -> void {
        if (n->leafAttr >= 0) {
            leafAttrs.push_back(n->leafAttr);
            return;
        }
        self(self, n->lc.get());
        self(self, n->rc.get());
    };
    collect(collect, x);
    for (AttrId l : leafAttrs) {
        AttrSet e = ctx.q.universe();
        e.remove(l);
        double ne = static_cast<double>(ctx.q.relations[ctx.edgeOfLabel.at(e.raw())].size());
        prodLeaf *= ne;
        minLeaf = std::min(minLeaf, ne);
    }
    double bound = std::min(minLeaf, prodLeaf / std::pow(P, leaves - 1));
    if (static_cast<double>(cd.d.size()) > bound * (1 + 1e-9) + 1e-9)
        throw ContractViolation("lw property (3) violated");
    // (1) pi_label(J \ C) subseteq D
    if (ctx.opt.referenceJoin) {
        const Relation& j = *ctx.opt.referenceJoin;
        Relation cReordered = cd.c.empty() ? cd.c : cd.c.reordered(j.schema());
        for (size_t i = 0; i < j.size(); ++i) {
            auto row = j.row(i);
            if (!cd.c.empty() && cReordered.containsRow(row)) continue;
            std::vector<Value> proj;
            for (AttrId a : cd.d.schema()) {
                size_t pos = static_cast<size_t>(
                    std::find(j.schema().begin(), j.schema().end(), a) - j.schema().begin());
                proj.push_back(row[pos]);
            }
            if (!cd.d.containsRow(proj))
                throw ContractViolation("lw property (1) violated");
        }
    }
}

CD lw_rec(LwCtx& ctx, const ShapeNode* x, bool isRoot) {
    const int n = ctx.q.numAttrs();
    std::vector<AttrId> vcols;
    for (int a = 0; a < n; ++a) vcols.push_back(a);

    if (x->leafAttr >= 0) {
        CD cd{Relation(vcols, {}), ctx.q.relations[ctx.edgeOfLabel.at(x->label.raw())]};
        check_properties(ctx, x, cd);
        return cd;
    }
    CD left = lw_rec(ctx, x->lc.get(), false);
    CD right = lw_rec(ctx, x->rc.get(), false);

    const AttrSet lab = x->label;
    std::vector<std::vector<Value>> cRows;
    // C_L and C_R carry over
    for (size_t i = 0; i < left.c.size(); ++i) {
        ctx.wc.step();
        cRows.emplace_back(left.c.row(i).begin(), left.c.row(i).end());
    }
    for (size_t i = 0; i < right.c.size(); ++i) {
        ctx.wc.step();
        cRows.emplace_back(right.c.row(i).begin(), right.c.row(i).end());
    }

    std::vector<std::vector<Value>> dRows;
    if (!right.d.empty()) {  // F = G = empty when |D_R| = 0
        KeyMap lGroups = group_by(left.d, lab, &ctx.wc);
        KeyMap rGroups = group_by(right.d, lab, &ctx.wc);
        const double ceilPoverDr =
            std::ceil(ctx.sizeBoundP / static_cast<double>(right.d.size()));

        // F = pi_lab(D_L) ∩ pi_lab(D_R), split into light G and deferred F \ G
        for (auto& [key, lIdx] : lGroups) {
            auto it = rGroups.find(key);
            ctx.wc.step();
            if (it == rGroups.end()) continue;
            const bool light =
                isRoot || static_cast<double>(lIdx.size()) + 1.0 <= ceilPoverDr;
            if (light) {
                // join the two sections; result spans all of V
                for (auto li : lIdx) {
                    for (auto ri : it->second) {
                        ctx.wc.emit();
                        std::vector<Value> row(static_cast<size_t>(n));
                        auto lrow = left.d.row(li);
                        auto rrow = right.d.row(ri);
                        for (size_t p = 0; p < left.d.schema().size(); ++p)
                            row[static_cast<size_t>(left.d.schema()[p])] = lrow[p];
                        for (size_t p = 0; p < right.d.schema().size(); ++p)
                            row[static_cast<size_t>(right.d.schema()[p])] = rrow[p];
                        cRows.push_back(std::move(row));
                    }
                }
            } else {
                ctx.wc.emit();
                dRows.push_back(key);
            }
        }
    }

    CD cd;
    cd.c = Relation(vcols, cRows);
    std::vector<AttrId> labCols = lab.toVector();
    cd.d = isRoot ? Relation(labCols, {}) : Relation(labCols, dRows);
    check_properties(ctx, x, cd);
    return cd;
}

}  // namespace

Relation lw_join(const JoinQuery& q, const LwOptions& opt, LwStats* stats) {
    q.validate();
    if (!is_lw_instance(q))
        throw ContractViolation("lw_join: not a Loomis-Whitney instance");
    const int n = q.numAttrs();
    std::vector<AttrId> vcols;
    for (int a = 0; a < n; ++a) vcols.push_back(a);
    if (q.hasEmptyRelation()) return Relation(vcols, {});

    LwCtx ctx{q, opt, 0.0, {}, {}};
    double logP = 0.0;
    for (const auto& r : q.relations) logP += std::log(static_cast<double>(r.size()));
    ctx.sizeBoundP = std::exp(logP / (n - 1));
    for (int e = 0; e < q.numEdges(); ++e) ctx.edgeOfLabel[q.edges[e].raw()] = e;

    auto shape = build_shape(vcols, 0, vcols.size(), q.universe());
    CD root = lw_rec(ctx, shape.get(), true);

    // Pruning pass: keep tuples whose every (n-1)-projection is present.
    std::vector<std::vector<Value>> out;
    for (size_t i = 0; i < root.c.size(); ++i) {
        auto row = root.c.row(i);
        bool ok = true;
        for (int e = 0; e < q.numEdges() && ok; ++e) {
            ctx.wc.step();
            std::vector<Value> proj;
            proj.reserve(q.relations[e].arity());
            for (AttrId a : q.relations[e].schema()) proj.push_back(row[static_cast<size_t>(a)]);
            ok = q.relations[e].containsRow(proj);
        }
        if (ok) out.emplace_back(row.begin(), row.end());
    }
    if (stats) {
        stats->work += ctx.wc;
        stats->candidateRows = root.c.size();
    }
    return Relation(vcols, out);
}

Relation triangle_join(const Relation& r, const Relation& s, const Relation& t, AttrId a,
                       AttrId b, AttrId c, TauMode tau, TriangleStats* stats) {
    if (r.attrs() != AttrSet::of({a, b}) || s.attrs() != AttrSet::of({b, c}) ||
        t.attrs() != AttrSet::of({a, c}))
        throw ContractViolation("triangle_join: schemas must be (A,B), (B,C), (A,C)");

    std::vector<AttrId> outSchema{a, b, c};
    std::sort(outSchema.begin(), outSchema.end());
    if (r.empty() || s.empty() || t.empty()) return Relation(outSchema, {});

    WorkCounter wc;
    KeyMap rByB = group_by(r, AttrSet::of({b}), &wc);
    KeyMap sByB = group_by(s, AttrSet::of({b}), &wc);

    // exact heavy test: |R[t_B]|^2 * |S| > |R| * |T|
    const __int128 rhs = static_cast<__int128>(r.size()) * static_cast<__int128>(t.size());
    auto isHeavy = [&](size_t fanout) {
        if (tau == TauMode::AllHeavy) return true;
        if (tau == TauMode::AllLight) return false;
        return static_cast<__int128>(fanout) * static_cast<__int128>(fanout) *
                   static_cast<__int128>(s.size()) >
               rhs;
    };

    Grouped gr(r, AttrSet::of({b}));
    Grouped gs(s, AttrSet::of({b}));
    size_t rAPos = static_cast<size_t>(gr.restCols[0]);
    size_t sCPos = static_cast<size_t>(gs.restCols[0]);

    std::uint64_t heavy = 0, candidates = 0;
    std::vector<std::vector<Value>> out;
    auto emit = [&](Value va, Value vb, Value vc) {
        std::vector<Value> row(3);
        row[static_cast<size_t>(std::find(outSchema.begin(), outSchema.end(), a) -
                                outSchema.begin())] = va;
        row[static_cast<size_t>(std::find(outSchema.begin(), outSchema.end(), b) -
                                outSchema.begin())] = vb;
        row[static_cast<size_t>(std::find(outSchema.begin(), outSchema.end(), c) -
                                outSchema.begin())] = vc;
        out.push_back(std::move(row));
    };

    for (auto& [key, rIdx] : rByB) {
        const Value vb = key[0];
        if (isHeavy(rIdx.size())) {
            // heavy key: candidates D x T, filtered against R and S
            ++heavy;
            for (size_t i = 0; i < t.size(); ++i) {
                wc.step();
                ++candidates;
                auto trow = t.row(i);
                Value va = trow[t.schema()[0] == a ? 0 : 1];
                Value vc = trow[t.schema()[0] == c ? 0 : 1];
                std::vector<Value> rProbe(2), sProbe(2);
                rProbe[r.schema()[0] == a ? 0 : 1] = va;
                rProbe[r.schema()[0] == b ? 0 : 1] = vb;
                if (!r.containsRow(rProbe)) continue;
                sProbe[s.schema()[0] == b ? 0 : 1] = vb;
                sProbe[s.schema()[0] == c ? 0 : 1] = vc;
                wc.step();
                if (!s.containsRow(sProbe)) continue;
                wc.emit();
                emit(va, vb, vc);
            }
        } else {
            // light key: G join S, filtered against T
            auto sIt = sByB.find(key);
            if (sIt == sByB.end()) continue;
            for (auto ri : rIdx) {
                Value va = r.row(ri)[rAPos];
                for (auto si : sIt->second) {
                    wc.step();
                    ++candidates;
                    Value vc = s.row(si)[sCPos];
                    std::vector<Value> tProbe(2);
                    tProbe[t.schema()[0] == a ? 0 : 1] = va;
                    tProbe[t.schema()[0] == c ? 0 : 1] = vc;
                    if (!t.containsRow(tProbe)) continue;
                    wc.emit();
                    emit(va, vb, vc);
                }
            }
        }
    }
    if (stats) {
        stats->work += wc;
        stats->heavyKeys = heavy;
        stats->candidateRows = candidates;
    }
    return Relation(outSchema, out);
}

}  // namespace wcoj
