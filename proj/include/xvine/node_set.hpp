#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace xvine {

/// Set of node labels 1..64 packed into a bitmask.
class NodeSet {
public:
    static constexpr int kMaxNode = 64;

    constexpr NodeSet() = default;
    constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}
    NodeSet(std::initializer_list<int> nodes) {
        for (int v : nodes) insert(v);
    }
    static NodeSet of(const std::vector<int>& nodes) {
        NodeSet s;
        for (int v : nodes) s.insert(v);
        return s;
    }
    static NodeSet range(int d) {
        return NodeSet(d >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << d) - 1));
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    int size() const { return std::popcount(bits_); }
    bool contains(int v) const { return v >= 1 && v <= kMaxNode && ((bits_ >> (v - 1)) & 1U); }
    void insert(int v) { bits_ |= std::uint64_t{1} << (v - 1); }
    void erase(int v) { bits_ &= ~(std::uint64_t{1} << (v - 1)); }
    bool subset_of(NodeSet o) const { return (bits_ & ~o.bits_) == 0; }

    int min() const { return bits_ ? std::countr_zero(bits_) + 1 : 0; }
    int max() const { return bits_ ? 64 - std::countl_zero(bits_) : 0; }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        for (std::uint64_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
        return out;
    }
    /// Concatenated labels, e.g. "234"; labels above 9 are comma separated.
    std::string str() const {
        std::string s;
        bool wide = max() > 9;
        for (int v : to_vector()) {
            if (wide && !s.empty()) s += ',';
            s += std::to_string(v);
        }
        return s;
    }

    friend constexpr NodeSet operator|(NodeSet a, NodeSet b) { return NodeSet(a.bits_ | b.bits_); }
    friend constexpr NodeSet operator&(NodeSet a, NodeSet b) { return NodeSet(a.bits_ & b.bits_); }
    friend constexpr NodeSet operator-(NodeSet a, NodeSet b) { return NodeSet(a.bits_ & ~b.bits_); }
    friend constexpr bool operator==(NodeSet a, NodeSet b) = default;
    friend constexpr auto operator<=>(NodeSet a, NodeSet b) = default;

private:
    std::uint64_t bits_ = 0;
};

}  // namespace xvine
