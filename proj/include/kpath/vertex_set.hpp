#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace kpath {

using Vertex = std::uint32_t;

/// Thrown when a caller violates a documented precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Fixed-capacity bitmask over vertex ids [0, capacity).
///
/// Binary operations require both operands to share the same capacity;
/// a mismatch is a ContractError, never a silent resize.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(std::size_t capacity)
        : capacity_(capacity), words_((capacity + 63) / 64, 0) {}
    VertexSet(std::size_t capacity, std::initializer_list<Vertex> members)
        : VertexSet(capacity) {
        for (Vertex v : members) insert(v);
    }

    static VertexSet full(std::size_t capacity) {
        VertexSet s(capacity);
        for (std::size_t v = 0; v < capacity; ++v) s.insert(static_cast<Vertex>(v));
        return s;
    }

    std::size_t capacity() const noexcept { return capacity_; }

    bool contains(Vertex v) const noexcept {
        return v < capacity_ && ((words_[v >> 6] >> (v & 63)) & 1u) != 0;
    }

    void insert(Vertex v) {
        check_index(v);
        words_[v >> 6] |= std::uint64_t{1} << (v & 63);
    }

    void erase(Vertex v) {
        check_index(v);
        words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
    }

    VertexSet with(Vertex v) const {
        VertexSet out = *this;
        out.insert(v);
        return out;
    }

    VertexSet without(Vertex v) const {
        VertexSet out = *this;
        out.erase(v);
        return out;
    }

    std::size_t size() const noexcept {
        std::size_t n = 0;
        for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool empty() const noexcept {
        for (auto w : words_)
            if (w != 0) return false;
        return true;
    }

    VertexSet operator|(const VertexSet& o) const { return combine(o, [](auto a, auto b) { return a | b; }); }
    VertexSet operator&(const VertexSet& o) const { return combine(o, [](auto a, auto b) { return a & b; }); }
    /// Set difference.
    VertexSet operator-(const VertexSet& o) const { return combine(o, [](auto a, auto b) { return a & ~b; }); }

    VertexSet complement() const {
        VertexSet out(capacity_);
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = ~words_[i];
        out.trim();
        return out;
    }

    bool disjoint(const VertexSet& o) const {
        check_same(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return false;
        return true;
    }

    std::size_t intersection_size(const VertexSet& o) const {
        check_same(o);
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            n += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
        return n;
    }

    bool subset_of(const VertexSet& o) const {
        check_same(o);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    /// Members in increasing order.
    std::vector<Vertex> members() const {
        std::vector<Vertex> out;
        out.reserve(size());
        for_each([&](Vertex v) { out.push_back(v); });
        return out;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < words_.size(); ++i) {
            std::uint64_t w = words_[i];
            while (w) {
                auto bit = static_cast<unsigned>(std::countr_zero(w));
                f(static_cast<Vertex>(i * 64 + bit));
                w &= w - 1;
            }
        }
    }

    /// Space-separated sorted ids, e.g. "0 3 7"; empty string for the empty set.
    std::string to_string() const;

    std::size_t hash() const noexcept {
        std::size_t h = capacity_ * 0x9e3779b97f4a7c15ULL;
        for (auto w : words_) h = (h ^ w) * 0x100000001b3ULL + (h >> 29);
        return h;
    }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

    /// Orders by capacity, then lexicographically by sorted member list.
    friend bool operator<(const VertexSet& a, const VertexSet& b) {
        if (a.capacity_ != b.capacity_) return a.capacity_ < b.capacity_;
        auto ma = a.members();
        auto mb = b.members();
        return ma < mb;
    }

private:
    void check_index(Vertex v) const {
        if (v >= capacity_)
            throw ContractError("vertex " + std::to_string(v) + " outside set capacity " +
                                std::to_string(capacity_));
    }
    void check_same(const VertexSet& o) const {
        if (o.capacity_ != capacity_)
            throw ContractError("vertex set capacity mismatch (" + std::to_string(capacity_) +
                                " vs " + std::to_string(o.capacity_) + ")");
    }
    template <class Op>
    VertexSet combine(const VertexSet& o, Op op) const {
        check_same(o);
        VertexSet out(capacity_);
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = op(words_[i], o.words_[i]);
        return out;
    }
    void trim() {
        if (capacity_ % 64 != 0 && !words_.empty())
            words_.back() &= (std::uint64_t{1} << (capacity_ % 64)) - 1;
    }

    std::size_t capacity_ = 0;
    std::vector<std::uint64_t> words_;
};

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const noexcept { return s.hash(); }
};

}  // namespace kpath
