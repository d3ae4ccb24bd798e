#pragma once

#include <cstdint>

#include "wcoj/query.hpp"
#include "wcoj/trie.hpp"

namespace wcoj {

struct LwOptions {
    // Assert the proof properties (1)-(3) at every shape-tree node. Needs the
    // reference join for property (1); pass it from a test oracle.
    bool checkProperties = false;
    const Relation* referenceJoin = nullptr;
};

struct LwStats {
    WorkCounter work;
    std::uint64_t candidateRows = 0;  // |C(root)| before pruning
};

// Algorithm for Loomis-Whitney instances: E must be all (n-1)-subsets of V.
// Output schema: ascending attribute ids.
Relation lw_join(const JoinQuery& q, const LwOptions& opt = {}, LwStats* stats = nullptr);

bool is_lw_instance(const JoinQuery& q);

enum class TauMode { Auto, AllHeavy, AllLight };

struct TriangleStats {
    WorkCounter work;
    std::uint64_t heavyKeys = 0;       // |D|
    std::uint64_t candidateRows = 0;   // |D x T| + |G join S|
};

// Heavy/light triangle join for R(A,B), S(B,C), T(A,C). The heavy test
// |R[t_B]| > sqrt(|R||T|/|S|) is evaluated as the exact integer comparison
// |R[t_B]|^2 * |S| > |R| * |T|.
Relation triangle_join(const Relation& r, const Relation& s, const Relation& t, AttrId a,
                       AttrId b, AttrId c, TauMode tau = TauMode::Auto,
                       TriangleStats* stats = nullptr);

}  // namespace wcoj
