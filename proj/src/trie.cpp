#include "wcoj/trie.hpp"

#include <algorithm>

namespace wcoj {

TrieIndex::TrieIndex(const Relation& r, const TotalOrder& to) {
    attrs_ = r.schema();
    std::sort(attrs_.begin(), attrs_.end(),
              [&](AttrId a, AttrId b) { return to.rank(a) < to.rank(b); });
    const int k = static_cast<int>(attrs_.size());
    if (k == 0) return;

    Relation sorted = r.reordered(attrs_);
    vals_.resize(k);
    childBegin_.resize(k - 1);

    const size_t n = sorted.size();
    // Nodes at level d are the distinct length-(d+1) prefixes; each owns a
    // contiguous row span. nodeEnd[d][i] = one past the last row of node i.
    std::vector<std::vector<std::uint32_t>> nodeEnd(k);
    std::vector<std::uint32_t> parents{static_cast<std::uint32_t>(n)};
    for (int level = 0; level < k; ++level) {
        size_t rowStart = 0;
        for (std::uint32_t groupEnd : parents) {
            size_t i = rowStart;
            while (i < groupEnd) {
                Value v = sorted.row(i)[level];
                size_t j = i + 1;
                while (j < groupEnd && sorted.row(j)[level] == v) ++j;
                vals_[level].push_back(v);
                nodeEnd[level].push_back(static_cast<std::uint32_t>(j));
                i = j;
            }
            rowStart = groupEnd;
        }
        parents = nodeEnd[level];
    }
    for (int level = 0; level + 1 < k; ++level) {
        auto& cb = childBegin_[level];
        cb.assign(vals_[level].size() + 1, 0);
        std::uint32_t c = 0;
        for (size_t i = 0; i < nodeEnd[level].size(); ++i) {
            cb[i + 1] = cb[i];
            while (c < nodeEnd[level + 1].size() && nodeEnd[level + 1][c] <= nodeEnd[level][i]) {
                ++cb[i + 1];
                ++c;
            }
        }
    }
}

std::optional<TrieIndex::Handle> TrieIndex::step(Handle h, Value v, WorkCounter* wc) const {
    if (wc) wc->step();
    if (h.depth >= arity()) return std::nullopt;
    const auto& vals = vals_[h.depth];
    auto first = vals.begin() + h.lo;
    auto last = vals.begin() + h.hi;
    auto it = std::lower_bound(first, last, v);
    if (it == last || *it != v) return std::nullopt;
    auto idx = static_cast<std::uint32_t>(it - vals.begin());
    if (h.depth + 1 < arity())
        return Handle{h.depth + 1, childBegin_[h.depth][idx], childBegin_[h.depth][idx + 1]};
    return Handle{h.depth + 1, idx, idx + 1};
}

std::optional<TrieIndex::Handle> TrieIndex::locate(std::span<const Value> prefix,
                                                   WorkCounter* wc) const {
    Handle h = root();
    for (Value v : prefix) {
        auto next = step(h, v, wc);
        if (!next) return std::nullopt;
        h = *next;
    }
    return h;
}

std::uint64_t TrieIndex::count(Handle h, int j, WorkCounter* wc) const {
    if (j < h.depth || j > arity()) throw ContractViolation("trie count: level out of range");
    if (j == h.depth) return 1;
    std::uint32_t lo = h.lo, hi = h.hi;
    for (int d = h.depth; d + 1 < j; ++d) {
        if (wc) wc->step();
        lo = childBegin_[d][lo];
        hi = childBegin_[d][hi];
    }
    if (wc) wc->step();
    return hi - lo;
}

void TrieIndex::enumerate(Handle h, int j, WorkCounter* wc,
                          const std::function<void(std::span<const Value>)>& fn) const {
    if (j < h.depth || j > arity()) throw ContractViolation("trie enumerate: level out of range");
    if (h.depth == arity() || j == h.depth) {
        if (wc) wc->emit();
        fn({});
        return;
    }
    std::vector<Value> buf(static_cast<size_t>(j - h.depth));
    auto rec = [&](auto&& self, int d, std::uint32_t lo, std::uint32_t hi) -> void {
        for (std::uint32_t i = lo; i < hi; ++i) {
            buf[static_cast<size_t>(d - h.depth)] = vals_[d][i];
            if (d + 1 == j) {
                if (wc) wc->emit();
                fn(buf);
            } else {
                self(self, d + 1, childBegin_[d][i], childBegin_[d][i + 1]);
            }
        }
    };
    rec(rec, h.depth, h.lo, h.hi);
}

void TrieIndex::checkPrefixTuple(const Tuple& t) const {
    if (t.schema.size() > attrs_.size())
        throw ContractViolation("trie: tuple longer than arity");
    for (size_t i = 0; i < t.schema.size(); ++i)
        if (t.schema[i] != attrs_[i])
            throw ContractViolation("trie: tuple support is not a prefix of the attribute order");
}

bool TrieIndex::prefixContains(const Tuple& t, WorkCounter* wc) const {
    checkPrefixTuple(t);
    if (t.schema.empty()) return rowCount() > 0;
    return locate(t.values, wc).has_value();
}

std::uint64_t TrieIndex::sectionCount(const Tuple& t, int j, WorkCounter* wc) const {
    checkPrefixTuple(t);
    auto h = locate(t.values, wc);
    if (!h) return 0;
    return count(*h, j, wc);
}

std::vector<std::vector<Value>> TrieIndex::sectionEnumerate(const Tuple& t, int j,
                                                            WorkCounter* wc) const {
    checkPrefixTuple(t);
    std::vector<std::vector<Value>> out;
    auto h = locate(t.values, wc);
    if (!h) return out;
    enumerate(*h, j, wc, [&](std::span<const Value> v) { out.emplace_back(v.begin(), v.end()); });
    return out;
}

}  // namespace wcoj
