#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace kinetikos {

/// Subset of {0, ..., universe-1} stored as a bitset. Used for hyperedges.
class IndexSet {
public:
    IndexSet() = default;
    explicit IndexSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}
    IndexSet(std::size_t universe, std::span<const std::size_t> members) : IndexSet(universe) {
        for (std::size_t i : members) insert(i);
    }

    std::size_t universe() const noexcept { return universe_; }

    void insert(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    void erase(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    bool contains(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1U; }

    std::size_t size() const noexcept {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    bool empty() const noexcept {
        for (auto w : words_)
            if (w) return false;
        return true;
    }

    std::size_t intersection_size(const IndexSet& o) const noexcept {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) c += static_cast<std::size_t>(std::popcount(words_[i] & o.words_[i]));
        return c;
    }
    bool intersects(const IndexSet& o) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & o.words_[i]) return true;
        return false;
    }
    bool is_subset_of(const IndexSet& o) const noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }

    IndexSet& operator&=(const IndexSet& o) noexcept {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
        return *this;
    }
    friend IndexSet operator&(IndexSet a, const IndexSet& b) noexcept { return a &= b; }

    template <typename F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                f(w * 64 + static_cast<std::size_t>(b));
                bits &= bits - 1;
            }
        }
    }

    /// Members in increasing order.
    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

    /// Low 64 bits; exact when universe <= 64.
    std::uint64_t low_word() const noexcept { return words_.empty() ? 0 : words_[0]; }
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    std::size_t hash() const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL ^ universe_;
        for (auto w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return static_cast<std::size_t>(h);
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;
    /// Orders by size, then lexicographically by member list.
    friend bool operator<(const IndexSet& a, const IndexSet& b) {
        const auto sa = a.size(), sb = b.size();
        if (sa != sb) return sa < sb;
        return a.indices() < b.indices();
    }

    /// "0,3,7" form used in catalog files.
    std::string to_string() const {
        std::string s;
        for_each([&](std::size_t i) {
            if (!s.empty()) s += ',';
            s += std::to_string(i);
        });
        return s;
    }

private:
    std::size_t universe_ = 0;
    std::vector<std::uint64_t> words_;
};

struct IndexSetHash {
    std::size_t operator()(const IndexSet& s) const noexcept { return s.hash(); }
};

}  // namespace kinetikos
