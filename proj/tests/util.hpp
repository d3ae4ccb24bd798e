#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "wcoj/brute_force.hpp"
#include "wcoj/preprocess.hpp"
#include "wcoj/query.hpp"

namespace wcoj::testutil {

using Rng = std::mt19937_64;

inline int randint(Rng& rng, int lo, int hi) {  // inclusive
    return static_cast<int>(lo + rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Random hypergraph over n attributes and m edges; every attribute covered by
// construction (attributes are dealt onto edges first, then edges are padded).
inline std::vector<AttrSet> random_hypergraph(Rng& rng, int n, int m, int maxArity = 0) {
    if (maxArity <= 0) maxArity = n;
    while (m * maxArity < n) ++m;  // enough slots to cover everything
    std::vector<AttrSet> edges(static_cast<size_t>(m));
    std::vector<int> perm(static_cast<size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int a : perm) {
        for (;;) {
            int e = randint(rng, 0, m - 1);
            if (edges[static_cast<size_t>(e)].count() < maxArity) {
                edges[static_cast<size_t>(e)].add(a);
                break;
            }
        }
    }
    for (auto& e : edges) {
        while (e.empty() || (e.count() < maxArity && randint(rng, 0, 2) == 0))
            e.add(randint(rng, 0, n - 1));
    }
    return edges;
}

inline Relation random_relation(Rng& rng, const std::vector<AttrId>& schema, int maxRows,
                                int domain) {
    int rows = randint(rng, 0, maxRows);
    std::vector<std::vector<Value>> data;
    for (int i = 0; i < rows; ++i) {
        std::vector<Value> row;
        for (size_t c = 0; c < schema.size(); ++c)
            row.push_back(static_cast<Value>(randint(rng, 0, domain - 1)));
        data.push_back(std::move(row));
    }
    return Relation(schema, data);
}

// Exactly `rows` distinct rows (requires domain^arity >= rows).
inline Relation random_relation_exact(Rng& rng, const std::vector<AttrId>& schema, int rows,
                                      int domain) {
    std::set<std::vector<Value>> data;
    while (static_cast<int>(data.size()) < rows) {
        std::vector<Value> row;
        for (size_t c = 0; c < schema.size(); ++c)
            row.push_back(static_cast<Value>(randint(rng, 0, domain - 1)));
        data.insert(std::move(row));
    }
    return Relation(schema, {data.begin(), data.end()});
}

// LW instance over n attributes with exactly `size` rows per relation.
inline JoinQuery random_lw_instance(Rng& rng, int n, int size, int domain) {
    JoinQuery q;
    for (int a = 0; a < n; ++a) q.attrNames.push_back("x" + std::to_string(a));
    for (int i = 0; i < n; ++i) {
        AttrSet e = AttrSet::universe(n);
        e.remove(i);
        q.edges.push_back(e);
        q.relations.push_back(random_relation_exact(rng, e.toVector(), size, domain));
    }
    return q;
}

struct InstanceOpts {
    int maxAttrs = 5;
    int maxEdges = 6;
    int maxRows = 40;
    int domain = 8;
    int maxArity = 0;
    int minRows = 0;
};

inline JoinQuery random_instance(Rng& rng, const InstanceOpts& opt = {}) {
    int n = randint(rng, 1, opt.maxAttrs);
    int m = randint(rng, 1, opt.maxEdges);
    JoinQuery q;
    for (int a = 0; a < n; ++a) q.attrNames.push_back(std::string(1, static_cast<char>('A' + a)));
    q.edges = random_hypergraph(rng, n, m, opt.maxArity);
    for (const AttrSet& e : q.edges) {
        auto schema = e.toVector();
        Relation r = random_relation(rng, schema, opt.maxRows, opt.domain);
        while (static_cast<int>(r.size()) < opt.minRows)
            r = random_relation(rng, schema, opt.maxRows, opt.domain);
        q.relations.push_back(std::move(r));
    }
    return q;
}

// Random instance with no empty relation (cover LP needs N_e >= 1).
inline JoinQuery random_nonempty_instance(Rng& rng, InstanceOpts opt = {}) {
    opt.minRows = 1;
    return random_instance(rng, opt);
}

// Independent oracle for full conjunctive queries with constants and repeats:
// enumerate variable assignments over the active domains and check each atom
// against its stored table directly.
inline Relation full_cq_oracle(const FullQuery& fq) {
    const int n = static_cast<int>(fq.attrNames.size());
    std::vector<std::vector<Value>> domains(static_cast<size_t>(n));
    for (const auto& atom : fq.atoms) {
        const RawTable& t = fq.tables[atom.tableIndex];
        size_t vi = 0;
        for (size_t c = 0; c < t.arity(); ++c) {
            if (atom.constants.count(static_cast<int>(c))) continue;
            AttrId v = atom.vars[vi++];
            for (const auto& row : t.rows) domains[static_cast<size_t>(v)].push_back(row[c]);
        }
    }
    for (auto& d : domains) {
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
    }
    std::vector<AttrId> schema;
    for (int a = 0; a < n; ++a) schema.push_back(a);
    std::vector<Value> assign(static_cast<size_t>(n));
    std::vector<std::vector<Value>> out;
    auto rec = [&](auto&& self, int level) -> void {
        if (level == n) {
            for (const auto& atom : fq.atoms) {
                const RawTable& t = fq.tables[atom.tableIndex];
                bool any = false;
                for (const auto& row : t.rows) {
                    bool match = true;
                    size_t vi = 0;
                    for (size_t c = 0; c < t.arity() && match; ++c) {
                        auto it = atom.constants.find(static_cast<int>(c));
                        Value want = it != atom.constants.end()
                                         ? it->second
                                         : assign[static_cast<size_t>(atom.vars[vi++])];
                        if (row[c] != want) match = false;
                    }
                    if (match) { any = true; break; }
                }
                if (!any) return;
            }
            out.push_back(assign);
            return;
        }
        for (Value v : domains[static_cast<size_t>(level)]) {
            assign[static_cast<size_t>(level)] = v;
            self(self, level + 1);
        }
    };
    rec(rec, 0);
    return Relation(schema, out);
}

// Random full CQ with repeats and constants; every head variable appears in
// some atom.
inline FullQuery random_full_cq(Rng& rng) {
    FullQuery fq;
    int n = randint(rng, 1, 3);
    for (int a = 0; a < n; ++a) fq.attrNames.push_back(std::string(1, static_cast<char>('x' + a)));
    int m = randint(rng, 1, 3);
    for (int t = 0; t < m; ++t) {
        RawTable table;
        table.name = "T" + std::to_string(t);
        int arity = randint(rng, 1, 3);
        for (int c = 0; c < arity; ++c) table.columnNames.push_back("c" + std::to_string(c));
        int rows = randint(rng, 0, 12);
        for (int i = 0; i < rows; ++i) {
            std::vector<Value> row;
            for (int c = 0; c < arity; ++c) row.push_back(randint(rng, 0, 3));
            table.rows.push_back(std::move(row));
        }
        fq.tables.push_back(std::move(table));

        FullQueryAtom atom;
        atom.tableIndex = t;
        for (int c = 0; c < arity; ++c) {
            if (randint(rng, 0, 5) == 0)
                atom.constants[c] = randint(rng, 0, 3);
            else
                atom.vars.push_back(randint(rng, 0, n - 1));
        }
        if (atom.vars.empty()) {
            atom.constants.erase(0);
            atom.vars.push_back(randint(rng, 0, n - 1));
        }
        fq.atoms.push_back(std::move(atom));
    }
    std::vector<bool> seen(static_cast<size_t>(n), false);
    for (const auto& atom : fq.atoms)
        for (AttrId v : atom.vars) seen[static_cast<size_t>(v)] = true;
    for (int v = 0; v < n; ++v) {
        if (seen[static_cast<size_t>(v)]) continue;
        RawTable table;
        table.name = "U" + std::to_string(v);
        table.columnNames = {"c0"};
        for (int i = 0; i < 3; ++i) table.rows.push_back({i});
        fq.tables.push_back(std::move(table));
        FullQueryAtom atom;
        atom.tableIndex = static_cast<int>(fq.tables.size()) - 1;
        atom.vars = {v};
        fq.atoms.push_back(std::move(atom));
    }
    return fq;
}

}  // namespace wcoj::testutil
