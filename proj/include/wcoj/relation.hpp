#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wcoj/attrset.hpp"
#include "wcoj/errors.hpp"

namespace wcoj {

// Dictionary code. Integer-looking tokens encode as themselves; everything else
// is interned above kStringBase so the two ranges cannot collide.
using Value = std::int64_t;

class Dictionary {
public:
    static constexpr Value kStringBase = 1LL << 40;

    Value encode(const std::string& token);
    std::string decode(Value code) const;
    bool isString(Value code) const { return code >= kStringBase; }

private:
    std::vector<std::string> strings_;
    std::unordered_map<std::string, Value> codes_;
};

struct Tuple {
    std::vector<AttrId> schema;  // support, in a fixed order
    std::vector<Value> values;   // one per schema entry

    AttrSet attrs() const { return AttrSet::from(schema); }
    std::optional<Value> valueOf(AttrId a) const {
        for (size_t i = 0; i < schema.size(); ++i)
            if (schema[i] == a) return values[i];
        return std::nullopt;
    }
};

// Duplicate-free tuple set over a fixed schema. Rows are stored row-major,
// lexicographically sorted in schema order; relations are immutable after
// construction and safe to share across readers.
class Relation {
public:
    Relation() = default;
    Relation(std::vector<AttrId> schema, const std::vector<std::vector<Value>>& rows);
    static Relation fromFlat(std::vector<AttrId> schema, std::vector<Value> flat);
    // Rows already sorted and duplicate-free; asserted, not re-sorted.
    static Relation fromSortedUnique(std::vector<AttrId> schema, std::vector<Value> flat);

    const std::vector<AttrId>& schema() const { return schema_; }
    AttrSet attrs() const { return AttrSet::from(schema_); }
    size_t arity() const { return schema_.size(); }
    size_t size() const { return arity() ? flat_.size() / arity() : (flat_.empty() ? zeroArityCount_ : 0); }
    bool empty() const { return size() == 0; }

    std::span<const Value> row(size_t i) const {
        return {flat_.data() + i * arity(), arity()};
    }
    const std::vector<Value>& flat() const { return flat_; }

    bool containsRow(std::span<const Value> values) const;

    // Column permutation; resulting rows re-sorted under the new order.
    Relation reordered(const std::vector<AttrId>& newSchema) const;

    std::vector<std::vector<Value>> rowsCopy() const;

    bool operator==(const Relation& o) const {
        return schema_ == o.schema_ && flat_ == o.flat_ && zeroArityCount_ == o.zeroArityCount_;
    }
    // Set equality irrespective of column order.
    bool sameRows(const Relation& o) const;

private:
    std::vector<AttrId> schema_;
    std::vector<Value> flat_;
    // A zero-arity relation is either {} or {()}; rows can't represent that.
    size_t zeroArityCount_ = 0;
};

Relation project(const Relation& r, AttrSet s);
Relation section(const Relation& r, const Tuple& t);
Relation semijoin(const Relation& r, const Relation& s);

}  // namespace wcoj
