#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wcoj/query.hpp"
#include "wcoj/trie.hpp"

namespace wcoj {

// Empty-triangle family: R = S = T = {(0,j)} u {(j,0)}, j = 1..N/2, over the
// triangle R(A,B), S(B,C), T(A,C). Every pairwise join has N^2/4 + N/2 tuples
// while the full join is empty.
JoinQuery gen_triangle_instance(std::uint64_t n);

// Bad LW instance: domain {0..(N-1)/(n-1)}, R_i = all tuples over [n]\{i}
// with at most one non-zero value. |R_i| = N, |join| = N + (N-1)/(n-1).
JoinQuery gen_lw_bad_instance(int n, std::uint64_t bigN);
std::uint64_t lw_bad_join_size(int n, std::uint64_t bigN);

// Relaxed-join lower bound: edges {i} bound to [N] plus one n-ary edge bound
// to the constant diagonals {N+i}^n. |q_r| = N + N^n for r > 0.
JoinQuery gen_relaxed_lb_instance(int n, std::uint64_t bigN);

// Embeds the bad LW family into a larger hypergraph: the F edges carry the
// bad LW data on U, everything else is pinned to the constant 0. (U, F) must
// satisfy the structural conditions validated at generation time.
struct ExtensionSpec {
    std::vector<std::string> attrNames;
    std::vector<std::vector<int>> edges;  // attr ids
    std::vector<int> u;                   // U as attr ids
    std::vector<int> f;                   // F as edge indices
};
JoinQuery gen_extension_instance(const ExtensionSpec& spec, std::uint64_t bigN);

struct BinaryPlanStats {
    std::vector<std::uint64_t> intermediateSizes;  // |J_2| .. |J_{m-1}|
    std::uint64_t maxIntermediate = 0;
    std::uint64_t outSize = 0;
    WorkCounter work;
};

// Left-deep pairwise hash-join pipeline in the given edge order; intermediates
// are streamed and counted, never materialized.
Relation binary_join_plan(const JoinQuery& q, const std::vector<int>& order,
                          BinaryPlanStats* stats = nullptr);

// Exact |R_i join R_j| without materialization.
std::uint64_t pair_join_size(const JoinQuery& q, int i, int j);

// All m! left-deep orders (m <= 6): order minimizing the max intermediate.
std::pair<std::vector<int>, BinaryPlanStats> best_binary_plan(const JoinQuery& q);

struct BenchCell {
    std::string family;
    std::uint64_t n = 0;
    std::string algo;
    std::uint64_t work = 0;
    std::uint64_t maxIntermediate = 0;
    std::uint64_t outSize = 0;
    double wallMs = 0.0;
    std::string status = "ok";
};

struct BenchReport {
    std::vector<BenchCell> cells;
    // least-squares slope of log(work) vs log(N) per algo; needs >= 2 ok cells
    std::vector<std::pair<std::string, double>> slopes;

    std::string toCsv() const;
    std::string toJson() const;
};

// family: triangle | lwbad | relaxlb. algos: generic, generic-par, lw, graph,
// binary. Cells exceeding timeoutMs are recorded and larger sizes skipped.
BenchReport bench_compare(const std::string& family, const std::vector<std::uint64_t>& sizes,
                          const std::vector<std::string>& algos, double timeoutMs = 60000.0,
                          int lwBadN = 3);

}  // namespace wcoj
