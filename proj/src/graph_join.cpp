#include "wcoj/graph_join.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "wcoj/lw_join.hpp"

namespace wcoj {

namespace {

// Natural join of two relations via sort-merge on the shared attributes.
Relation join_pair(const Relation& a, const Relation& b, WorkCounter* wc) {
    AttrSet shared = a.attrs() & b.attrs();
    std::vector<AttrId> outSchema = a.schema();
    for (AttrId x : b.schema())
        if (!shared.contains(x)) outSchema.push_back(x);

    std::vector<size_t> aKey, bKey, bRest;
    for (AttrId x : shared.toVector()) {
        aKey.push_back(static_cast<size_t>(
            std::find(a.schema().begin(), a.schema().end(), x) - a.schema().begin()));
        bKey.push_back(static_cast<size_t>(
            std::find(b.schema().begin(), b.schema().end(), x) - b.schema().begin()));
    }
    for (size_t i = 0; i < b.schema().size(); ++i)
        if (!shared.contains(b.schema()[i])) bRest.push_back(i);

    std::map<std::vector<Value>, std::vector<std::uint32_t>> bGroups;
    for (std::uint32_t i = 0; i < b.size(); ++i) {
        if (wc) wc->step();
        std::vector<Value> key;
        for (size_t c : bKey) key.push_back(b.row(i)[c]);
        bGroups[std::move(key)].push_back(i);
    }
    std::vector<std::vector<Value>> rows;
    std::vector<Value> key;
    for (size_t i = 0; i < a.size(); ++i) {
        if (wc) wc->step();
        auto ra = a.row(i);
        key.clear();
        for (size_t c : aKey) key.push_back(ra[c]);
        auto it = bGroups.find(key);
        if (it == bGroups.end()) continue;
        for (auto bi : it->second) {
            if (wc) wc->emit();
            std::vector<Value> row(ra.begin(), ra.end());
            for (size_t c : bRest) row.push_back(b.row(bi)[c]);
            rows.push_back(std::move(row));
        }
    }
    return Relation(outSchema, rows);
}

Relation filter_by(const Relation& big, const Relation& filter, WorkCounter* wc) {
    if (wc) wc->step(big.size());
    return semijoin(big, filter);
}

// Order the cycle's edges into a closed walk; validates the simple-cycle shape.
struct Walk {
    std::vector<int> edges;      // positions into edgeIdxs resolved to edge ids
    std::vector<AttrId> verts;   // verts[i], verts[i+1 mod c] spans edges[i]
};

Walk derive_walk(const JoinQuery& q, const std::vector<int>& edgeIdxs) {
    const size_t c = edgeIdxs.size();
    if (c < 3) throw ContractViolation("cycle_join: need at least 3 edges");
    std::map<AttrId, std::vector<int>> at;
    for (int e : edgeIdxs) {
        if (q.edges[e].count() != 2)
            throw ContractViolation("cycle_join: non-binary edge in cycle");
        q.edges[e].forEach([&](AttrId v) { at[v].push_back(e); });
    }
    if (at.size() != c) throw ContractViolation("cycle_join: edges do not form a simple cycle");
    for (auto& [v, es] : at)
        if (es.size() != 2)
            throw ContractViolation("cycle_join: vertex degree != 2");

    Walk w;
    AttrId start = at.begin()->first;
    AttrId v = start;
    int e = at[v][0];
    for (size_t i = 0; i < c; ++i) {
        w.verts.push_back(v);
        w.edges.push_back(e);
        AttrSet next = q.edges[e];
        next.remove(v);
        v = next.smallest();
        e = (at[v][0] == w.edges.back()) ? at[v][1] : at[v][0];
    }
    if (v != start) throw ContractViolation("cycle_join: edges do not close a cycle");
    return w;
}

double log_size(const Relation& r) { return std::log(static_cast<double>(r.size())); }

// Map a relation over `bundleAttrs` + one extra attr to a two-column relation
// (extra, bundleCode), interning bundle tuples.
struct Bundler {
    std::vector<AttrId> bundleCols;  // ascending attr ids
    std::map<std::vector<Value>, Value> codes;
    std::vector<std::vector<Value>> tuples;

    Value intern(const std::vector<Value>& t) {
        auto it = codes.find(t);
        if (it != codes.end()) return it->second;
        Value code = static_cast<Value>(tuples.size());
        codes.emplace(t, code);
        tuples.push_back(t);
        return code;
    }
};

}  // namespace

Relation cycle_join(const JoinQuery& q, const std::vector<int>& edgeIdxs, CycleJoinInfo* info) {
    Walk w = derive_walk(q, edgeIdxs);
    const size_t c = w.edges.size();
    std::vector<AttrId> outSchema;
    for (AttrId v : w.verts) outSchema.push_back(v);
    std::sort(outSchema.begin(), outSchema.end());

    WorkCounter wc;
    auto finish = [&](Relation r) {
        if (info) info->work += wc;
        return r.reordered(outSchema);
    };

    if (c % 2 == 0) {
        // even cycle: cross-product the cheaper alternating class, then filter
        double log0 = 0, log1 = 0;
        for (size_t i = 0; i < c; ++i)
            (i % 2 ? log1 : log0) += log_size(q.relations[w.edges[i]]);
        size_t keep = log0 <= log1 ? 0 : 1;
        if (info) {
            info->even = true;
            info->chosenClassLog = keep == 0 ? log0 : log1;
            info->otherClassLog = keep == 0 ? log1 : log0;
        }
        Relation x = q.relations[w.edges[keep]];
        for (size_t i = keep + 2; i < c; i += 2) x = join_pair(x, q.relations[w.edges[i]], &wc);
        for (size_t i = 1 - keep; i < c; i += 2) x = filter_by(x, q.relations[w.edges[i]], &wc);
        return finish(x);
    }

    // odd cycle, edges e_1..e_{2k'+1} with walk position i holding e_{i+1}.
    // The even class of rotation r equals the odd class of rotation r+1, so the
    // rotation minimizing the odd-class product keeps that product no larger
    // than the even one.
    {
        auto oddClassLog = [&](size_t rot) {
            double s = 0;
            for (size_t i = 0; i + 1 < c; i += 2)
                s += log_size(q.relations[w.edges[(rot + i) % c]]);
            return s;
        };
        size_t bestRot = 0;
        double best = oddClassLog(0);
        for (size_t r = 1; r < c; ++r) {
            double v = oddClassLog(r);
            if (v < best - 1e-12) {
                best = v;
                bestRot = r;
            }
        }
        std::rotate(w.edges.begin(), w.edges.begin() + static_cast<long>(bestRot), w.edges.end());
        std::rotate(w.verts.begin(), w.verts.begin() + static_cast<long>(bestRot), w.verts.end());
    }
    double logO = 0, logE = 0;
    for (size_t i = 0; i + 1 < c; ++i) (i % 2 ? logE : logO) += log_size(q.relations[w.edges[i]]);
    if (info) {
        info->even = false;
        info->chosenClassLog = logO;
        info->otherClassLog = logE;
    }

    if (c == 3) {
        // delegate to the LW algorithm with n = 3
        std::vector<AttrId> verts = outSchema;
        JoinQuery sub;
        sub.dict = q.dict;
        for (AttrId v : verts) sub.attrNames.push_back(q.attrName(v));
        auto localId = [&](AttrId v) {
            return static_cast<AttrId>(std::find(verts.begin(), verts.end(), v) - verts.begin());
        };
        for (int e : w.edges) {
            std::vector<AttrId> schema;
            for (AttrId v : q.relations[e].schema()) schema.push_back(localId(v));
            sub.edges.push_back(AttrSet::from(schema));
            sub.relations.push_back(Relation(schema, q.relations[e].rowsCopy()));
        }
        LwStats ls;
        Relation sr = lw_join(sub, {}, &ls);
        wc += ls.work;
        std::vector<std::vector<Value>> rows = sr.rowsCopy();  // local ids ascend with verts
        return finish(Relation(outSchema, rows));
    }

    double sqrtLogAll = 0;
    for (int e : w.edges) sqrtLogAll += log_size(q.relations[e]);
    sqrtLogAll /= 2.0;

    // X = cross product of the odd class e_1, e_3, ..., e_{2k'-1}
    Relation x = q.relations[w.edges[0]];
    for (size_t i = 2; i + 1 < c; i += 2) x = join_pair(x, q.relations[w.edges[i]], &wc);

    // S = {v_2..v_{2k'-1}} (1-based verts); W = X_S filtered with inner even edges
    AttrSet sAttrs;
    for (size_t i = 1; i + 2 < c; ++i) sAttrs.add(w.verts[i]);
    wc.step(x.size());
    Relation xs = project(x, sAttrs);
    Relation wRel = xs;
    for (size_t i = 1; i + 3 < c; i += 2) wRel = filter_by(wRel, q.relations[w.edges[i]], &wc);

    const int e2k = w.edges[c - 2];      // e_{2k'}  = {v_{2k'-1}, v_{2k'}} (0-based verts)
    const int e2k1 = w.edges[c - 1];     // e_{2k'+1} = {v_{2k'}, v_0}
    const double logW = wRel.empty() ? -std::numeric_limits<double>::infinity()
                                     : std::log(static_cast<double>(wRel.size()));
    const bool firstOk = logW + log_size(q.relations[e2k]) <= sqrtLogAll + 1e-9;
    const bool secondOk = logW + log_size(q.relations[e2k1]) <= sqrtLogAll + 1e-9;
    if (!firstOk && !secondOk)
        throw ContractViolation("cycle_join: neither closing edge fits the size budget");
    if (info) info->bundledWithLastEdge = firstOk ? 1 : 0;

    // Build the bundled triangle R'(A,B) = X, S'(B,C) = W x R_bundleEdge,
    // T'(A,C) = remaining closing edge.
    const AttrId vLast = w.verts[c - 1];   // last vertex of the walk, v_{2k'+1}
    const AttrId vPrev = w.verts[c - 2];   // v_{2k'}
    const AttrId v0 = w.verts[0];          // v_1

    AttrId aAttr, cAttr;
    int bundleEdge, closeEdge;
    AttrSet bundleSet = sAttrs;
    if (firstOk) {
        bundleEdge = e2k;    // Y = W x e_{2k'}; bundle = S u {v_{2k'}}
        closeEdge = e2k1;
        bundleSet.add(vPrev);
        aAttr = v0;
        cAttr = vLast;
    } else {
        bundleEdge = e2k1;   // Y = W x e_{2k'+1}; bundle = S u {v_1}
        closeEdge = e2k;
        bundleSet.add(v0);
        aAttr = vPrev;
        cAttr = vLast;
    }

    Bundler bundler;
    bundler.bundleCols = bundleSet.toVector();

    auto bundleRelation = [&](const Relation& rel, AttrId extra) {
        // rel spans bundleSet + {extra}; emit (extra=0, bundle=1) pairs
        std::vector<size_t> bcols;
        for (AttrId a : bundler.bundleCols)
            bcols.push_back(static_cast<size_t>(
                std::find(rel.schema().begin(), rel.schema().end(), a) - rel.schema().begin()));
        size_t ecol = static_cast<size_t>(
            std::find(rel.schema().begin(), rel.schema().end(), extra) - rel.schema().begin());
        std::vector<std::vector<Value>> rows;
        std::vector<Value> bt(bcols.size());
        for (size_t i = 0; i < rel.size(); ++i) {
            wc.step();
            auto row = rel.row(i);
            for (size_t j = 0; j < bcols.size(); ++j) bt[j] = row[bcols[j]];
            rows.push_back({row[ecol], bundler.intern(bt)});
        }
        return Relation(std::vector<AttrId>{0, 1}, rows);
    };

    Relation y = join_pair(wRel, q.relations[bundleEdge], &wc);  // cross product
    Relation rAB = bundleRelation(x, aAttr);                     // (A, B)
    Relation sBC;
    {
        // (B, C) from Y: bundle + cAttr... note Y spans bundleSet u {vLast or both}
        std::vector<size_t> bcols;
        for (AttrId a : bundler.bundleCols)
            bcols.push_back(static_cast<size_t>(
                std::find(y.schema().begin(), y.schema().end(), a) - y.schema().begin()));
        size_t ccol = static_cast<size_t>(
            std::find(y.schema().begin(), y.schema().end(), cAttr) - y.schema().begin());
        std::vector<std::vector<Value>> rows;
        std::vector<Value> bt(bcols.size());
        for (size_t i = 0; i < y.size(); ++i) {
            wc.step();
            auto row = y.row(i);
            for (size_t j = 0; j < bcols.size(); ++j) bt[j] = row[bcols[j]];
            rows.push_back({bundler.intern(bt), row[ccol]});
        }
        sBC = Relation(std::vector<AttrId>{1, 2}, rows);
    }
    Relation tAC;
    {
        const Relation& ce = q.relations[closeEdge];
        std::vector<std::vector<Value>> rows;
        size_t acol = static_cast<size_t>(
            std::find(ce.schema().begin(), ce.schema().end(), aAttr) - ce.schema().begin());
        for (size_t i = 0; i < ce.size(); ++i) {
            wc.step();
            auto row = ce.row(i);
            rows.push_back({row[acol], row[1 - acol]});
        }
        tAC = Relation(std::vector<AttrId>{0, 2}, rows);
    }

    TriangleStats ts;
    Relation tri = triangle_join(rAB, sBC, tAC, 0, 1, 2, TauMode::Auto, &ts);
    wc += ts.work;

    // Unbundle back to the cycle's attributes.
    std::vector<std::vector<Value>> rows;
    for (size_t i = 0; i < tri.size(); ++i) {
        wc.emit();
        auto row = tri.row(i);  // schema (0,1,2) = (A, bundle, C)
        std::vector<Value> full(outSchema.size());
        auto put = [&](AttrId attr, Value v) {
            full[static_cast<size_t>(std::find(outSchema.begin(), outSchema.end(), attr) -
                                     outSchema.begin())] = v;
        };
        put(aAttr, row[0]);
        put(cAttr, row[2]);
        const auto& bt = bundler.tuples[static_cast<size_t>(row[1])];
        for (size_t j = 0; j < bundler.bundleCols.size(); ++j) put(bundler.bundleCols[j], bt[j]);
        rows.push_back(std::move(full));
    }
    return finish(Relation(outSchema, rows));
}

Relation graph_join(const JoinQuery& q, GraphJoinStats* stats) {
    q.validate();
    for (const AttrSet& e : q.edges)
        if (e.count() > 2) throw ContractViolation("graph_join: edge with arity > 2");

    std::vector<AttrId> outSchema;
    for (int a = 0; a < q.numAttrs(); ++a) outSchema.push_back(a);
    if (q.hasEmptyRelation()) return Relation(outSchema, {});

    WorkCounter wc;

    // Collapse duplicate parallel edges by intersecting their relations.
    JoinQuery g;
    g.attrNames = q.attrNames;
    g.dict = q.dict;
    std::map<std::uint64_t, int> edgeOf;
    for (int e = 0; e < q.numEdges(); ++e) {
        auto it = edgeOf.find(q.edges[e].raw());
        if (it == edgeOf.end()) {
            edgeOf[q.edges[e].raw()] = static_cast<int>(g.edges.size());
            g.edges.push_back(q.edges[e]);
            g.relations.push_back(q.relations[e]);
        } else {
            Relation& have = g.relations[it->second];
            wc.step(have.size());
            have = semijoin(have, q.relations[e].reordered(have.schema()));
        }
    }
    if (g.hasEmptyRelation()) return Relation(outSchema, {});

    GraphCoverDecomposition d = graph_cover_decompose(g);
    if (stats) stats->decomposition = d;

    // Star components: join x=1 edges that share vertices.
    std::vector<Relation> pieces;
    std::vector<bool> used(g.edges.size(), false);
    for (size_t i = 0; i < d.stars.size(); ++i) {
        int e0 = d.stars[i];
        if (used[e0]) continue;
        used[e0] = true;
        Relation piece = g.relations[e0];
        bool grew = true;
        while (grew) {
            grew = false;
            for (int f : d.stars) {
                if (used[f] || !g.edges[f].intersects(piece.attrs())) continue;
                used[f] = true;
                piece = join_pair(piece, g.relations[f], &wc);
                grew = true;
            }
        }
        pieces.push_back(std::move(piece));
    }
    for (const auto& cyc : d.cycles) {
        CycleJoinInfo info;
        pieces.push_back(cycle_join(g, cyc, &info));
        wc += info.work;
    }

    if (pieces.empty()) throw ContractViolation("graph_join: empty support");
    Relation result = std::move(pieces[0]);
    for (size_t i = 1; i < pieces.size(); ++i) result = join_pair(result, pieces[i], &wc);

    // Zero-weight edges still constrain the output: final semijoin filters.
    for (int e : d.zeros) result = filter_by(result, g.relations[e], &wc);

    if (stats) stats->work += wc;
    return result.reordered(outSchema);
}

}  // namespace wcoj
