#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dyntrap {

class RankOutOfRange : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

class StaleHandle : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A '1'-terminated bit string read as the binary fraction 0.bits.
class OrderKey {
public:
    OrderKey() = default;
    explicit OrderKey(std::string bits) : bits_(std::move(bits)) {}

    const std::string& bits() const { return bits_; }
    std::size_t length() const { return bits_.size(); }

    /// Numeric comparison of the fractions (zero padded lexicographic).
    friend int compare(const OrderKey& a, const OrderKey& b);
    friend bool operator<(const OrderKey& a, const OrderKey& b) { return compare(a, b) < 0; }
    friend bool operator==(const OrderKey& a, const OrderKey& b) { return a.bits_ == b.bits_; }

private:
    std::string bits_;
};

struct OrderHandle {
    std::uint32_t index = UINT32_MAX;
    std::uint32_t generation = 0;

    bool empty() const { return index == UINT32_MAX; }
    friend bool operator==(const OrderHandle&, const OrderHandle&) = default;
};

/// Treap over positions with subtree sizes. Every node carries the code of
/// its root path, so two handles compare by a single key comparison.
class Treap {
public:
    explicit Treap(std::uint64_t seed = 0x9e3779b97f4a7c15ULL);

    std::size_t size() const { return live_; }

    /// Inserts at 1-based position `rank`; later elements shift right.
    OrderHandle emplace_at(std::size_t rank);
    OrderHandle emplace_random(std::mt19937_64& rng);
    void drop(OrderHandle h);

    bool less(OrderHandle a, OrderHandle b) const;
    std::size_t rank(OrderHandle h) const;
    OrderHandle at(std::size_t rank) const;
    bool valid(OrderHandle h) const;
    const OrderKey& key(OrderHandle h) const;

    std::vector<OrderHandle> in_order() const;
    std::size_t max_depth() const;

    /// Number of keys recomputed since construction.
    std::uint64_t rewritten_keys() const { return rewritten_; }

    /// Heap, search-order, size and code consistency; empty when sound.
    std::vector<std::string> audit() const;

private:
    static constexpr std::uint32_t kNil = UINT32_MAX;

    struct Node {
        std::uint64_t prio = 0;
        std::uint64_t seq = 0;
        std::uint32_t size = 1;
        std::uint32_t parent = kNil;
        std::uint32_t left = kNil;
        std::uint32_t right = kNil;
        std::uint32_t generation = 0;
        bool alive = false;
        OrderKey key;
    };

    const Node& node(OrderHandle h) const;
    std::uint32_t size_of(std::uint32_t i) const { return i == kNil ? 0 : nodes_[i].size; }
    bool heap_before(std::uint32_t a, std::uint32_t b) const;
    void rotate_up(std::uint32_t x);
    void pull(std::uint32_t i);
    std::uint32_t& link_from_parent(std::uint32_t i);
    void rewrite_keys(std::uint32_t top);
    std::string code_for_child(std::uint32_t parent, bool right_side) const;

    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_;
    std::uint32_t root_ = kNil;
    std::size_t live_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t rewritten_ = 0;
    std::mt19937_64 prio_rng_;
};

}  // namespace dyntrap
