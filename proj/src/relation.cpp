#include "wcoj/relation.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "wcoj/query.hpp"

namespace wcoj {

Value Dictionary::encode(const std::string& token) {
    Value v;
    auto [p, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec == std::errc() && p == token.data() + token.size() && v < kStringBase && v > -kStringBase)
        return v;
    auto it = codes_.find(token);
    if (it != codes_.end()) return it->second;
    Value code = kStringBase + static_cast<Value>(strings_.size());
    strings_.push_back(token);
    codes_.emplace(token, code);
    return code;
}

std::string Dictionary::decode(Value code) const {
    if (code >= kStringBase) {
        size_t idx = static_cast<size_t>(code - kStringBase);
        if (idx >= strings_.size()) throw SchemaError("dictionary code not in use");
        return strings_[idx];
    }
    return std::to_string(code);
}

namespace {

bool rowLess(const Value* a, const Value* b, size_t k) {
    for (size_t i = 0; i < k; ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

}  // namespace

Relation::Relation(std::vector<AttrId> schema, const std::vector<std::vector<Value>>& rows) {
    schema_ = std::move(schema);
    const size_t k = schema_.size();
    if (k == 0) {
        zeroArityCount_ = rows.empty() ? 0 : 1;
        return;
    }
    std::vector<Value> flat;
    flat.reserve(rows.size() * k);
    for (const auto& r : rows) {
        if (r.size() != k) throw SchemaError("row arity does not match schema");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    *this = fromFlat(std::move(schema_), std::move(flat));
}

Relation Relation::fromFlat(std::vector<AttrId> schema, std::vector<Value> flat) {
    Relation r;
    r.schema_ = std::move(schema);
    const size_t k = r.schema_.size();
    if (k == 0) {
        r.zeroArityCount_ = flat.empty() ? 0 : 1;
        return r;
    }
    const size_t n = flat.size() / k;
    std::vector<std::uint32_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
        return rowLess(flat.data() + a * k, flat.data() + b * k, k);
    });
    r.flat_.reserve(flat.size());
    for (size_t i = 0; i < n; ++i) {
        const Value* src = flat.data() + idx[i] * k;
        if (!r.flat_.empty() &&
            std::equal(src, src + k, r.flat_.data() + r.flat_.size() - k))
            continue;  // duplicate
        r.flat_.insert(r.flat_.end(), src, src + k);
    }
    return r;
}

Relation Relation::fromSortedUnique(std::vector<AttrId> schema, std::vector<Value> flat) {
    Relation r;
    r.schema_ = std::move(schema);
    const size_t k = r.schema_.size();
    if (k == 0) {
        r.zeroArityCount_ = flat.empty() ? 0 : 1;
        return r;
    }
    r.flat_ = std::move(flat);
#ifndef NDEBUG
    const size_t n = r.flat_.size() / k;
    for (size_t i = 1; i < n; ++i)
        assert(rowLess(r.flat_.data() + (i - 1) * k, r.flat_.data() + i * k, k));
#endif
    return r;
}

bool Relation::containsRow(std::span<const Value> values) const {
    const size_t k = arity();
    if (values.size() != k) throw SchemaError("probe arity mismatch");
    if (k == 0) return zeroArityCount_ > 0;
    size_t lo = 0, hi = size();
    while (lo < hi) {
        size_t mid = (lo + hi) / 2;
        const Value* m = flat_.data() + mid * k;
        if (rowLess(m, values.data(), k))
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo < size() && std::equal(values.begin(), values.end(), flat_.data() + lo * k);
}

Relation Relation::reordered(const std::vector<AttrId>& newSchema) const {
    if (AttrSet::from(newSchema) != attrs() || newSchema.size() != schema_.size())
        throw SchemaError("reordered: schema is not a permutation");
    std::vector<size_t> perm(newSchema.size());
    for (size_t i = 0; i < newSchema.size(); ++i) {
        auto it = std::find(schema_.begin(), schema_.end(), newSchema[i]);
        perm[i] = static_cast<size_t>(it - schema_.begin());
    }
    const size_t k = arity();
    std::vector<Value> flat;
    flat.reserve(flat_.size());
    for (size_t i = 0; i < size(); ++i) {
        auto r = row(i);
        for (size_t j = 0; j < k; ++j) flat.push_back(r[perm[j]]);
    }
    Relation out = fromFlat(newSchema, std::move(flat));
    out.zeroArityCount_ = zeroArityCount_;
    return out;
}

std::vector<std::vector<Value>> Relation::rowsCopy() const {
    std::vector<std::vector<Value>> out;
    out.reserve(size());
    for (size_t i = 0; i < size(); ++i) {
        auto r = row(i);
        out.emplace_back(r.begin(), r.end());
    }
    return out;
}

bool Relation::sameRows(const Relation& o) const {
    if (attrs() != o.attrs()) return false;
    if (size() != o.size()) return false;
    if (schema_ == o.schema_) return flat_ == o.flat_;
    return o.reordered(schema_).flat() == flat_;
}

Relation project(const Relation& r, AttrSet s) {
    if (!s.subsetOf(r.attrs())) throw SchemaError("project: attributes outside schema");
    std::vector<AttrId> outSchema;
    std::vector<size_t> cols;
    for (size_t i = 0; i < r.schema().size(); ++i) {
        if (s.contains(r.schema()[i])) {
            outSchema.push_back(r.schema()[i]);
            cols.push_back(i);
        }
    }
    std::vector<Value> flat;
    flat.reserve(r.size() * cols.size());
    for (size_t i = 0; i < r.size(); ++i) {
        auto row = r.row(i);
        for (size_t c : cols) flat.push_back(row[c]);
    }
    if (outSchema.empty())
        return Relation(outSchema, r.empty() ? std::vector<std::vector<Value>>{}
                                             : std::vector<std::vector<Value>>{{}});
    return Relation::fromFlat(std::move(outSchema), std::move(flat));
}

Relation section(const Relation& r, const Tuple& t) {
    if (!t.attrs().subsetOf(r.attrs())) throw SchemaError("section: tuple support outside schema");
    std::vector<AttrId> outSchema;
    std::vector<size_t> keepCols;
    std::vector<std::pair<size_t, Value>> match;  // (column, required value)
    for (size_t i = 0; i < r.schema().size(); ++i) {
        AttrId a = r.schema()[i];
        if (t.attrs().contains(a)) {
            match.emplace_back(i, *t.valueOf(a));
        } else {
            outSchema.push_back(a);
            keepCols.push_back(i);
        }
    }
    std::vector<std::vector<Value>> rows;
    for (size_t i = 0; i < r.size(); ++i) {
        auto row = r.row(i);
        bool ok = true;
        for (auto [c, v] : match)
            if (row[c] != v) { ok = false; break; }
        if (!ok) continue;
        std::vector<Value> out;
        out.reserve(keepCols.size());
        for (size_t c : keepCols) out.push_back(row[c]);
        rows.push_back(std::move(out));
    }
    return Relation(outSchema, rows);
}

Relation semijoin(const Relation& r, const Relation& s) {
    AttrSet shared = r.attrs() & s.attrs();
    if (shared.empty())
        return s.empty() ? Relation(r.schema(), {}) : r;
    Relation keys = project(s, shared);
    std::vector<size_t> cols;
    for (AttrId a : keys.schema()) {
        auto it = std::find(r.schema().begin(), r.schema().end(), a);
        cols.push_back(static_cast<size_t>(it - r.schema().begin()));
    }
    std::vector<Value> probe(cols.size());
    std::vector<std::vector<Value>> rows;
    for (size_t i = 0; i < r.size(); ++i) {
        auto row = r.row(i);
        for (size_t j = 0; j < cols.size(); ++j) probe[j] = row[cols[j]];
        if (keys.containsRow(probe)) rows.emplace_back(row.begin(), row.end());
    }
    return Relation(r.schema(), rows);
}

void JoinQuery::validate() const {
    if (edges.empty()) throw SchemaError("query: no edges");
    if (edges.size() != relations.size())
        throw SchemaError("query: edge/binding count mismatch");
    AttrSet covered;
    for (size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].empty()) throw SchemaError("query: empty edge");
        if (!edges[i].subsetOf(universe()))
            throw SchemaError("query: edge attribute outside universe");
        if (relations[i].attrs() != edges[i])
            throw SchemaError("query: binding schema does not match edge " + std::to_string(i));
        covered = covered | edges[i];
    }
    if (covered != universe())
        throw SchemaError("query: some attribute appears in no edge");
}

std::string attrSetToString(const JoinQuery& q, AttrSet s) {
    std::string out = "{";
    bool first = true;
    s.forEach([&](AttrId a) {
        if (!first) out += ",";
        out += q.attrName(a);
        first = false;
    });
    out += "}";
    return out;
}

}  // namespace wcoj
