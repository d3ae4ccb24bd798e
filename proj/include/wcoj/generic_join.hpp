#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>

#include "wcoj/cover_lp.hpp"
#include "wcoj/plan.hpp"
#include "wcoj/trie.hpp"

namespace wcoj {

struct GjOptions {
    std::vector<int> edgeOrder;   // empty: input edge order
    bool checkBounds = true;      // assert |Ret| <= B(u,y,t_S) at every call
    bool debugChecks = false;     // weight-feasibility assertions
    std::ostream* trace = nullptr;  // per-node decision log; forces sequential
    int parallelThreads = 0;      // 0/1: sequential reference mode
};

struct JoinRunStats {
    WorkCounter work;
    std::uint64_t recursionCalls = 0;
    std::uint64_t nodeChecks = 0;       // bound checks performed
    std::uint64_t boundViolations = 0;  // |Ret| > B * (1 + 1e-9)
    double maxExcessLog = -std::numeric_limits<double>::infinity();  // max ln|Ret| - ln B
    std::uint64_t outSize = 0;
    double logBound = 0.0;  // root AGM bound, log-space
    double wallMs = 0.0;
};

// Full pipeline: plan tree, total order, tries, then the recursive join.
// Output schema is the total order of V. cover defaults to solve_cover_lp(q).
Relation generic_join(const JoinQuery& q, const CoverSolution* cover = nullptr,
                      const GjOptions& opt = {}, JoinRunStats* stats = nullptr);

struct AgmReport {
    std::uint64_t outSize = 0;
    double logBound = 0.0;
    bool outputWithinBound = false;
    std::uint64_t nodeChecks = 0;
    std::uint64_t nodeViolations = 0;
    double maxExcessLog = 0.0;

    std::string toJson() const;
};

// Verifies |output| <= Prod N_e^{x_e} and that no per-node output-size bound
// check failed during the run. Violations are a bug signal: throws.
AgmReport agm_bound_check(const JoinQuery& q, const CoverSolution& x, const JoinRunStats& stats);

}  // namespace wcoj
