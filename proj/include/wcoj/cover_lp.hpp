#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wcoj/query.hpp"

namespace wcoj {

constexpr double kFeasEps = 1e-9;

// Point in the fractional edge cover polytope of a query, with the
// log-space AGM bound Sum_e x_e * ln(N_e).
struct CoverSolution {
    std::vector<double> x;
    double objective = 0.0;

    double logBound() const { return objective; }
    double boundValue() const;
};

// Optimal basic feasible cover, deterministic under Bland's rule. Falls back
// to the always-feasible all-ones cover on numerical trouble.
CoverSolution solve_cover_lp(const JoinQuery& q);

// LP(S): cover of the full universe using only the listed edges. Returns
// weights aligned with edgeIdxs. nullopt when (V, S) is infeasible
// (S does not cover V).
std::optional<CoverSolution> solve_cover_lp_subset(const JoinQuery& q,
                                                   const std::vector<int>& edgeIdxs);

bool cover_feasible(const JoinQuery& q, std::span<const double> x, double eps = kFeasEps);

// Exact feasibility via rational snapping of the float solution
// (denominators <= maxDen). nullopt when some coordinate does not snap.
struct Rational {
    long long num = 0;
    long long den = 1;
};
std::optional<std::vector<Rational>> rationalize(std::span<const double> x, long long maxDen,
                                                 double tol = 1e-7);
bool cover_feasible_exact(const JoinQuery& q, const std::vector<Rational>& x);

struct TightenResult {
    JoinQuery query;       // may gain projection edges
    CoverSolution cover;   // tight: every attribute constraint met with equality
    int steps = 0;
};

// Tightening transformation: split edges until every cover constraint is tight,
// never increasing the bound and never changing the join output. A split
// whose tight part is empty adjusts the weight in place instead of creating
// an empty-attribute edge.
TightenResult tighten_cover(const JoinQuery& q, const CoverSolution& x);

// Half-integral basic optimum of an arity<=2 query, decomposed per the
// star/odd-cycle structure.
struct GraphCoverDecomposition {
    std::vector<double> x;                  // snapped to {0, 1/2, 1}
    double objective = 0.0;
    std::vector<int> stars;                 // edges with x_e = 1
    std::vector<std::vector<int>> cycles;   // vertex-disjoint odd cycles, edges in walk order
    std::vector<int> zeros;
};

GraphCoverDecomposition graph_cover_decompose(const JoinQuery& q);

}  // namespace wcoj
