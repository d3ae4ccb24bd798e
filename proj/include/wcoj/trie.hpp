#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wcoj/plan.hpp"
#include "wcoj/relation.hpp"

namespace wcoj {

// Machine-independent cost unit: trie node steps + tuples emitted. This is the
// quantity the acceptance bounds are stated in; wall clock is informational.
struct WorkCounter {
    std::uint64_t trieSteps = 0;
    std::uint64_t tuplesEmitted = 0;

    std::uint64_t total() const { return trieSteps + tuplesEmitted; }
    void step(std::uint64_t k = 1) { trieSteps += k; }
    void emit(std::uint64_t k = 1) { tuplesEmitted += k; }
    WorkCounter& operator+=(const WorkCounter& o) {
        trieSteps += o.trieSteps;
        tuplesEmitted += o.tuplesEmitted;
        return *this;
    }
};

// Sorted-array search tree over a relation, keyed in total-order attribute
// order. Nested sorted runs give worst-case O(log N) per step; distinct
// prefixes of length d+1 are the nodes of level d.
class TrieIndex {
public:
    TrieIndex() = default;
    TrieIndex(const Relation& r, const TotalOrder& to);

    int arity() const { return static_cast<int>(attrs_.size()); }
    const std::vector<AttrId>& attrOrder() const { return attrs_; }
    std::uint64_t rowCount() const { return arity() ? vals_.back().size() : 0; }

    // Children candidates for the attribute at `depth`, i.e. the node set one
    // past a located prefix of length `depth`.
    struct Handle {
        int depth = 0;
        std::uint32_t lo = 0, hi = 0;
        std::uint64_t width() const { return hi - lo; }
    };

    Handle root() const {
        return {0, 0, static_cast<std::uint32_t>(arity() ? vals_[0].size() : 0)};
    }

    // One step down: binary search for v among the handle's candidates.
    std::optional<Handle> step(Handle h, Value v, WorkCounter* wc) const;

    // Walk a full prefix from the root; nullopt when absent.
    std::optional<Handle> locate(std::span<const Value> prefix, WorkCounter* wc) const;

    // Section count |pi_{a_{i+1}..a_j}(R[prefix])| for a located prefix of length i.
    std::uint64_t count(Handle h, int j, WorkCounter* wc) const;

    // Emit the distinct tuples of pi_{a_{i+1}..a_j}(R[prefix]) in lexicographic
    // order, in time linear in the output. fn receives a buffer of length j - i.
    void enumerate(Handle h, int j, WorkCounter* wc,
                   const std::function<void(std::span<const Value>)>& fn) const;

    // Convenience API over Tuples whose support is a prefix of attrOrder.
    bool prefixContains(const Tuple& t, WorkCounter* wc = nullptr) const;
    std::uint64_t sectionCount(const Tuple& t, int j, WorkCounter* wc = nullptr) const;
    std::vector<std::vector<Value>> sectionEnumerate(const Tuple& t, int j,
                                                     WorkCounter* wc = nullptr) const;

private:
    std::vector<AttrId> attrs_;
    std::vector<std::vector<Value>> vals_;              // per level, node values
    std::vector<std::vector<std::uint32_t>> childBegin_;  // per level < arity-1

    void checkPrefixTuple(const Tuple& t) const;
};

}  // namespace wcoj
