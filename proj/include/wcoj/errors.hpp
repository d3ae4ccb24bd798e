#pragma once

#include <stdexcept>
#include <string>

namespace wcoj {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed schemas: projection outside a schema, binding/edge mismatch, bad query files.
struct SchemaError : Error {
    using Error::Error;
};

// An operation was handed input outside its stated contract (non-LW hypergraph,
// arity > 2 edge, non-cycle edge list, infeasible weights).
struct ContractViolation : Error {
    using Error::Error;
};

// Data-dependent validation failures (FD violated by data, generator precondition).
struct ValidationError : Error {
    using Error::Error;
};

// Refusal to run past a configured enumeration budget.
struct BudgetExceeded : Error {
    using Error::Error;
};

}  // namespace wcoj
