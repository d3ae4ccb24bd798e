#include "wcoj/preprocess.hpp"

#include <algorithm>
#include <unordered_map>

namespace wcoj {

JoinQuery reduce_full_query(const FullQuery& fq) {
    const int n = static_cast<int>(fq.attrNames.size());
    std::vector<bool> seen(n, false);

    JoinQuery q;
    q.attrNames = fq.attrNames;
    q.dict = fq.dict;

    for (size_t ai = 0; ai < fq.atoms.size(); ++ai) {
        const FullQueryAtom& atom = fq.atoms[ai];
        if (atom.tableIndex < 0 || atom.tableIndex >= static_cast<int>(fq.tables.size()))
            throw SchemaError("atom " + std::to_string(ai) + ": bad table index");
        const RawTable& table = fq.tables[atom.tableIndex];
        if (atom.vars.size() + atom.constants.size() != table.arity())
            throw SchemaError("atom " + std::to_string(ai) + ": arity mismatch with " + table.name);

        // Column -> variable map (non-constant columns in order).
        std::vector<int> varOfCol(table.arity(), -1);
        {
            size_t vi = 0;
            for (size_t c = 0; c < table.arity(); ++c) {
                if (atom.constants.count(static_cast<int>(c))) continue;
                if (vi >= atom.vars.size())
                    throw SchemaError("atom " + std::to_string(ai) + ": constant column out of range");
                varOfCol[c] = atom.vars[vi++];
            }
        }
        for (AttrId v : atom.vars) {
            if (v < 0 || v >= n) throw SchemaError("atom variable outside universe");
            seen[v] = true;
        }

        // Distinct variables in first-occurrence order, with their first column.
        std::vector<AttrId> distinctVars;
        std::vector<size_t> firstCol;
        for (size_t c = 0; c < table.arity(); ++c) {
            int v = varOfCol[c];
            if (v < 0) continue;
            if (std::find(distinctVars.begin(), distinctVars.end(), v) == distinctVars.end()) {
                distinctVars.push_back(v);
                firstCol.push_back(c);
            }
        }
        if (distinctVars.empty())
            throw SchemaError("atom " + std::to_string(ai) + ": no variables (fully constant subgoal)");

        std::vector<std::vector<Value>> rows;
        for (const auto& row : table.rows) {
            if (row.size() != table.arity())
                throw SchemaError("table " + table.name + ": ragged row");
            bool ok = true;
            for (const auto& [c, v] : atom.constants)
                if (row[static_cast<size_t>(c)] != v) { ok = false; break; }
            if (ok) {
                // repeated variables must agree across their columns
                for (size_t c = 0; c < table.arity() && ok; ++c) {
                    int v = varOfCol[c];
                    if (v < 0) continue;
                    size_t fc = firstCol[std::find(distinctVars.begin(), distinctVars.end(), v) -
                                         distinctVars.begin()];
                    if (row[c] != row[fc]) ok = false;
                }
            }
            if (!ok) continue;
            std::vector<Value> out;
            out.reserve(distinctVars.size());
            for (size_t c : firstCol) out.push_back(row[c]);
            rows.push_back(std::move(out));
        }
        q.edges.push_back(AttrSet::from(distinctVars));
        q.relations.emplace_back(distinctVars, rows);
    }

    for (int v = 0; v < n; ++v)
        if (!seen[v])
            throw SchemaError("not a full query: head variable " + fq.attrNames[v] +
                              " does not appear in any subgoal");
    q.validate();
    return q;
}

namespace {

// Lookup map for one FD, built in a single pass over its relation.
struct FdMap {
    std::unordered_map<Value, Value> map;
};

FdMap build_fd_map(const JoinQuery& q, const Fd& fd) {
    if (fd.edge < 0 || fd.edge >= q.numEdges()) throw SchemaError("fd: bad edge index");
    const Relation& r = q.relations[fd.edge];
    if (!r.attrs().contains(fd.from) || !r.attrs().contains(fd.to))
        throw SchemaError("fd: attributes not in edge " + std::to_string(fd.edge));
    size_t cf = 0, ct = 0;
    for (size_t c = 0; c < r.schema().size(); ++c) {
        if (r.schema()[c] == fd.from) cf = c;
        if (r.schema()[c] == fd.to) ct = c;
    }
    FdMap out;
    for (size_t i = 0; i < r.size(); ++i) {
        auto row = r.row(i);
        auto [it, inserted] = out.map.emplace(row[cf], row[ct]);
        if (!inserted && it->second != row[ct])
            throw ValidationError("fd violated by data: " + q.attrName(fd.from) + "=" +
                                  std::to_string(row[cf]) + " maps to both " +
                                  std::to_string(it->second) + " and " + std::to_string(row[ct]) +
                                  " in edge " + std::to_string(fd.edge));
    }
    return out;
}

}  // namespace

JoinQuery fd_expand(const JoinQuery& q, const std::vector<Fd>& fds) {
    q.validate();
    if (fds.empty()) return q;

    const int n = q.numAttrs();
    // G(Gamma): one directed edge per FD; first-declared FD wins as the lookup
    // source for a (from,to) pair.
    std::vector<std::vector<size_t>> outFds(n);
    std::vector<FdMap> maps;
    maps.reserve(fds.size());
    for (size_t i = 0; i < fds.size(); ++i) {
        maps.push_back(build_fd_map(q, fds[i]));
        outFds[fds[i].from].push_back(i);
    }

    JoinQuery out;
    out.attrNames = q.attrNames;
    out.dict = q.dict;

    for (int e = 0; e < q.numEdges(); ++e) {
        const Relation& r = q.relations[e];
        std::vector<AttrId> schema = r.schema();
        std::vector<std::vector<Value>> rows = r.rowsCopy();
        AttrSet have = r.attrs();

        // Breadth-first closure walk; within a layer, ascending (attr, fd index).
        std::vector<AttrId> frontier = r.schema();
        std::sort(frontier.begin(), frontier.end());
        while (!frontier.empty()) {
            std::vector<AttrId> next;
            for (AttrId u : frontier) {
                size_t cu = std::find(schema.begin(), schema.end(), u) - schema.begin();
                for (size_t fi : outFds[u]) {
                    AttrId w = fds[fi].to;
                    if (have.contains(w)) continue;
                    for (auto& row : rows) {
                        auto it = maps[fi].map.find(row[cu]);
                        if (it == maps[fi].map.end())
                            throw ValidationError(
                                "fd expansion: value " + std::to_string(row[cu]) + " of " +
                                q.attrName(u) + " unreachable in fd source edge " +
                                std::to_string(fds[fi].edge));
                        row.push_back(it->second);
                    }
                    schema.push_back(w);
                    have.add(w);
                    next.push_back(w);
                }
            }
            std::sort(next.begin(), next.end());
            frontier = std::move(next);
        }

        out.edges.push_back(have);
        out.relations.emplace_back(schema, rows);
    }
    out.validate();
    return out;
}

}  // namespace wcoj
