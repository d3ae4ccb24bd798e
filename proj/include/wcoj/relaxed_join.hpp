#pragma once

#include <cstdint>
#include <vector>

#include "wcoj/cover_lp.hpp"
#include "wcoj/generic_join.hpp"
#include "wcoj/query.hpp"

namespace wcoj {

struct RelaxedSpec {
    const JoinQuery* q = nullptr;
    int r = 0;  // 0 <= r <= m
};

// One inclusion-minimal qualifying subset with its optimal-BFS data.
struct CoverClassMember {
    std::vector<int> edges;        // S, ascending edge indices
    std::vector<int> bfsSupport;   // BFS(S): edges with positive weight
    std::vector<double> weights;   // x* over `edges`
    double lpOptLog = 0.0;         // log LPOpt(S)
};

struct CoverFamily {
    std::uint64_t fullCount = 0;              // |C(q,r)|
    std::vector<CoverClassMember> hat;        // inclusion-minimal antichain
    std::vector<int> representatives;         // indices into hat, one per BFS class
    double sizeBoundLog() const;              // log of Sum_{S in C*} LPOpt(S)
};

// Enumerates C(q,r), its minimal antichain, and one lexicographically smallest
// representative per bfs-equivalence class. Refuses past the m^O(r) budget.
CoverFamily enumerate_cstar(const RelaxedSpec& spec);

struct RelaxedStats {
    WorkCounter work;
    std::uint64_t representativeJoins = 0;
};

// Algorithm for q_r: per representative, join the BFS support with generic
// join and keep tuples agreeing with at least m-r edges. Output schema:
// ascending attribute ids.
Relation relaxed_join(const RelaxedSpec& spec, RelaxedStats* stats = nullptr);

}  // namespace wcoj
