#pragma once

#include "wcoj/cover_lp.hpp"
#include "wcoj/query.hpp"
#include "wcoj/trie.hpp"

namespace wcoj {

struct CycleJoinInfo {
    WorkCounter work;
    bool even = false;
    double chosenClassLog = 0.0;   // log product of the materialized class
    double otherClassLog = 0.0;
    // odd cycles with >= 5 edges: which of the two closing edges was bundled
    int bundledWithLastEdge = -1;  // 1: e_{2k'}, 0: e_{2k'+1}; -1 when not applicable
};

// Evaluates a join whose edges form one simple cycle: even cycles materialize
// the cheaper alternating class, odd cycles close through a bundled triangle.
// The edge list may come in any order; it is walked internally.
Relation cycle_join(const JoinQuery& q, const std::vector<int>& edgeIdxs,
                    CycleJoinInfo* info = nullptr);

struct GraphJoinStats {
    WorkCounter work;
    GraphCoverDecomposition decomposition;
};

// Arity<=2 queries: half-integral decomposition, odd cycles via cycle_join,
// star edges joined directly, zero-weight edges applied as final filters.
// Output schema: ascending attribute ids.
Relation graph_join(const JoinQuery& q, GraphJoinStats* stats = nullptr);

}  // namespace wcoj
