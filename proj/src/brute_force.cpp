#include "wcoj/brute_force.hpp"

#include <algorithm>

namespace wcoj {

Relation brute_force_join(const JoinQuery& q, std::uint64_t budget) {
    q.validate();
    const int n = q.numAttrs();
    const int m = q.numEdges();

    std::vector<AttrId> outSchema;
    for (int a = 0; a < n; ++a) outSchema.push_back(a);
    if (q.hasEmptyRelation()) return Relation(outSchema, {});

    // Active domain per attribute: union of the values appearing in the
    // column of every relation bound to an edge containing it.
    std::vector<std::vector<Value>> domain(n);
    for (int e = 0; e < m; ++e) {
        const Relation& r = q.relations[e];
        for (size_t c = 0; c < r.schema().size(); ++c) {
            auto& d = domain[r.schema()[c]];
            for (size_t i = 0; i < r.size(); ++i) d.push_back(r.row(i)[c]);
        }
    }
    double estimate = 1.0;
    for (auto& d : domain) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        estimate *= static_cast<double>(d.size());
        if (estimate > static_cast<double>(budget))
            throw BudgetExceeded("brute_force_join: candidate space exceeds budget");
    }

    // For each edge, the column positions of its relation in ascending
    // attribute order and the first assignment level at which it is complete.
    struct EdgeCheck {
        std::vector<AttrId> attrOfCol;  // per relation column, the attribute it holds
        const Relation* rel;
    };
    std::vector<std::vector<EdgeCheck>> checksAtLevel(n + 1);
    for (int e = 0; e < m; ++e) {
        EdgeCheck ck;
        ck.rel = &q.relations[e];
        ck.attrOfCol = ck.rel->schema();
        int last = 0;
        for (AttrId a : ck.attrOfCol) last = std::max(last, a);
        checksAtLevel[last + 1].push_back(std::move(ck));
    }

    std::vector<Value> assign(n);
    std::vector<Value> probe;
    std::vector<std::vector<Value>> out;

    // Nested loops over attribute ids 0..n-1; an edge is checked as soon as
    // all its attributes are assigned.
    auto rec = [&](auto&& self, int level) -> void {
        for (const EdgeCheck& ck : checksAtLevel[level]) {
            probe.resize(ck.attrOfCol.size());
            for (size_t c = 0; c < ck.attrOfCol.size(); ++c) probe[c] = assign[ck.attrOfCol[c]];
            if (!ck.rel->containsRow(probe)) return;
        }
        if (level == n) {
            out.push_back(assign);
            return;
        }
        for (Value v : domain[level]) {
            assign[level] = v;
            self(self, level + 1);
        }
    };
    rec(rec, 0);
    return Relation(outSchema, out);
}

}  // namespace wcoj
