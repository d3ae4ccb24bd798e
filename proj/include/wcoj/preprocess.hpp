#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wcoj/query.hpp"

namespace wcoj {

struct RawTable {
    std::string name;
    std::vector<std::string> columnNames;
    std::vector<std::vector<Value>> rows;
    size_t arity() const { return columnNames.size(); }
};

// Subgoal of a full conjunctive query: vars gives the query variable (attribute
// id) for each non-constant column, in column order; variables may repeat.
struct FullQueryAtom {
    std::vector<AttrId> vars;
    std::map<int, Value> constants;  // column index -> pinned value
    int tableIndex = -1;
};

struct FullQuery {
    std::vector<std::string> attrNames;
    std::vector<FullQueryAtom> atoms;
    std::vector<RawTable> tables;
    std::shared_ptr<Dictionary> dict;
};

// Appendix reduction: one scan per subgoal keeping rows that satisfy constants
// and repeated-variable equalities, projected to distinct variables. The
// resulting hypergraph may have repeated edges. Rejects non-full queries.
JoinQuery reduce_full_query(const FullQuery& fq);

// Simple functional dependency e.u -> e.v.
struct Fd {
    int edge;
    AttrId from;
    AttrId to;
};

// Replaces each edge by its FD closure and extends relation contents
// attribute-by-attribute via per-FD lookup maps. Every declared FD is
// validated against its relation first.
JoinQuery fd_expand(const JoinQuery& q, const std::vector<Fd>& fds);

}  // namespace wcoj
