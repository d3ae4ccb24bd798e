#pragma once

#include <cstdint>

#include "wcoj/query.hpp"

namespace wcoj {

// Test oracle: enumerate the per-attribute active domains and keep every
// assignment whose projection onto each edge is in the bound relation.
// Refuses (BudgetExceeded) when the candidate-space estimate exceeds budget.
// Output schema: ascending attribute ids.
Relation brute_force_join(const JoinQuery& q, std::uint64_t budget = 100'000'000ULL);

}  // namespace wcoj
