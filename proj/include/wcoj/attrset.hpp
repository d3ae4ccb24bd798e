#pragma once

#include <bit>
#include <cassert>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace wcoj {

using AttrId = int;

// Set of attribute ids over a query universe of at most 64 attributes.
class AttrSet {
public:
    static constexpr int kMaxAttrs = 64;

    constexpr AttrSet() = default;

    static constexpr AttrSet of(std::initializer_list<int> ids) {
        AttrSet s;
        for (int id : ids) s.add(id);
        return s;
    }
    static AttrSet from(const std::vector<AttrId>& ids) {
        AttrSet s;
        for (int id : ids) s.add(id);
        return s;
    }
    // {0, 1, ..., n-1}
    static constexpr AttrSet universe(int n) {
        AttrSet s;
        s.bits_ = (n >= 64) ? ~0ULL : ((1ULL << n) - 1);
        return s;
    }

    constexpr void add(int id) {
        assert(id >= 0 && id < kMaxAttrs);
        bits_ |= (1ULL << id);
    }
    constexpr void remove(int id) { bits_ &= ~(1ULL << id); }
    constexpr bool contains(int id) const { return (bits_ >> id) & 1ULL; }

    constexpr bool empty() const { return bits_ == 0; }
    constexpr int count() const { return std::popcount(bits_); }
    constexpr int smallest() const {
        assert(bits_ != 0);
        return std::countr_zero(bits_);
    }

    constexpr AttrSet operator|(AttrSet o) const { return AttrSet(bits_ | o.bits_); }
    constexpr AttrSet operator&(AttrSet o) const { return AttrSet(bits_ & o.bits_); }
    constexpr AttrSet operator-(AttrSet o) const { return AttrSet(bits_ & ~o.bits_); }
    constexpr bool subsetOf(AttrSet o) const { return (bits_ & ~o.bits_) == 0; }
    constexpr bool intersects(AttrSet o) const { return (bits_ & o.bits_) != 0; }

    constexpr bool operator==(const AttrSet&) const = default;
    constexpr bool operator<(AttrSet o) const { return bits_ < o.bits_; }

    // Ascending-id iteration.
    std::vector<AttrId> toVector() const {
        std::vector<AttrId> out;
        out.reserve(count());
        for (std::uint64_t b = bits_; b;) {
            int id = std::countr_zero(b);
            out.push_back(id);
            b &= b - 1;
        }
        return out;
    }

    template <class Fn>
    void forEach(Fn&& fn) const {
        for (std::uint64_t b = bits_; b;) {
            fn(std::countr_zero(b));
            b &= b - 1;
        }
    }

    std::uint64_t raw() const { return bits_; }

private:
    explicit constexpr AttrSet(std::uint64_t bits) : bits_(bits) {}
    std::uint64_t bits_ = 0;
};

}  // namespace wcoj
