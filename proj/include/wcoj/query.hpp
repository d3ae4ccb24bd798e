#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wcoj/relation.hpp"

namespace wcoj {

// Natural join query as a hypergraph: universe {0..n-1}, one edge per bound
// relation. Edges may repeat as sets (multiset hypergraph).
struct JoinQuery {
    std::vector<std::string> attrNames;   // size n; display names
    std::vector<AttrSet> edges;           // size m
    std::vector<Relation> relations;      // size m; schema set == edge
    std::shared_ptr<Dictionary> dict;     // shared by all bindings; may be null

    int numAttrs() const { return static_cast<int>(attrNames.size()); }
    int numEdges() const { return static_cast<int>(edges.size()); }
    AttrSet universe() const { return AttrSet::universe(numAttrs()); }

    const std::string& attrName(AttrId a) const { return attrNames[a]; }

    bool hasEmptyRelation() const {
        for (const auto& r : relations)
            if (r.empty()) return true;
        return false;
    }

    // Throws SchemaError unless every attribute appears in >= 1 edge and every
    // binding's schema set equals its edge.
    void validate() const;
};

std::string attrSetToString(const JoinQuery& q, AttrSet s);

}  // namespace wcoj
