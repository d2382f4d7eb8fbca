#include "dyntrap/order.h"

#include <algorithm>
#include <utility>

namespace dyntrap {

int compare(const OrderKey& a, const OrderKey& b) {
    const std::string& x = a.bits_;
    const std::string& y = b.bits_;
    std::size_t n = std::min(x.size(), y.size());
    int c = x.compare(0, n, y, 0, n);
    if (c != 0) return c < 0 ? -1 : 1;
    if (x.size() == y.size()) return 0;
    const std::string& longer = x.size() > y.size() ? x : y;
    bool tail_set = longer.find('1', n) != std::string::npos;
    if (!tail_set) return 0;
    return x.size() > y.size() ? 1 : -1;
}

namespace {

// Keeps the priority stream apart from caller generators seeded alike.
std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

Treap::Treap(std::uint64_t seed) : prio_rng_(mix(seed)) {}

const Treap::Node& Treap::node(OrderHandle h) const {
    if (!valid(h)) throw StaleHandle("stale order handle");
    return nodes_[h.index];
}

bool Treap::valid(OrderHandle h) const {
    return h.index < nodes_.size() && nodes_[h.index].alive && nodes_[h.index].generation == h.generation;
}

const OrderKey& Treap::key(OrderHandle h) const { return node(h).key; }

bool Treap::heap_before(std::uint32_t a, std::uint32_t b) const {
    const Node& x = nodes_[a];
    const Node& y = nodes_[b];
    return x.prio != y.prio ? x.prio < y.prio : x.seq < y.seq;
}

void Treap::pull(std::uint32_t i) { nodes_[i].size = 1 + size_of(nodes_[i].left) + size_of(nodes_[i].right); }

std::uint32_t& Treap::link_from_parent(std::uint32_t i) {
    std::uint32_t p = nodes_[i].parent;
    if (p == kNil) return root_;
    return nodes_[p].left == i ? nodes_[p].left : nodes_[p].right;
}

// Lifts x above its parent.
void Treap::rotate_up(std::uint32_t x) {
    std::uint32_t p = nodes_[x].parent;
    std::uint32_t& slot = link_from_parent(p);
    slot = x;
    nodes_[x].parent = nodes_[p].parent;
    if (nodes_[p].left == x) {
        std::uint32_t mid = nodes_[x].right;
        nodes_[p].left = mid;
        if (mid != kNil) nodes_[mid].parent = p;
        nodes_[x].right = p;
    } else {
        std::uint32_t mid = nodes_[x].left;
        nodes_[p].right = mid;
        if (mid != kNil) nodes_[mid].parent = p;
        nodes_[x].left = p;
    }
    nodes_[p].parent = x;
    pull(p);
    pull(x);
}

std::string Treap::code_for_child(std::uint32_t parent, bool right_side) const {
    std::string bits = nodes_[parent].key.bits();
    bits.back() = right_side ? '1' : '0';
    bits.push_back('1');
    return bits;
}

void Treap::rewrite_keys(std::uint32_t top) {
    if (top == kNil) return;
    std::vector<std::uint32_t> stack{top};
    while (!stack.empty()) {
        std::uint32_t i = stack.back();
        stack.pop_back();
        std::uint32_t p = nodes_[i].parent;
        nodes_[i].key = p == kNil ? OrderKey("1") : OrderKey(code_for_child(p, nodes_[p].right == i));
        ++rewritten_;
        if (nodes_[i].left != kNil) stack.push_back(nodes_[i].left);
        if (nodes_[i].right != kNil) stack.push_back(nodes_[i].right);
    }
}

OrderHandle Treap::emplace_at(std::size_t rank) {
    if (rank < 1 || rank > live_ + 1) throw RankOutOfRange("rank " + std::to_string(rank) + " outside 1.." + std::to_string(live_ + 1));
    std::uint32_t x;
    if (!free_.empty()) {
        x = free_.back();
        free_.pop_back();
    } else {
        x = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
    }
    Node& n = nodes_[x];
    n.prio = prio_rng_();
    n.seq = seq_++;
    n.size = 1;
    n.left = n.right = n.parent = kNil;
    n.alive = true;
    n.generation++;

    if (root_ == kNil) {
        root_ = x;
    } else {
        std::uint32_t cur = root_;
        std::size_t r = rank;
        while (true) {
            nodes_[cur].size++;
            std::size_t here = size_of(nodes_[cur].left) + 1;
            if (r <= here) {
                if (nodes_[cur].left == kNil) {
                    nodes_[cur].left = x;
                    break;
                }
                cur = nodes_[cur].left;
            } else {
                r -= here;
                if (nodes_[cur].right == kNil) {
                    nodes_[cur].right = x;
                    break;
                }
                cur = nodes_[cur].right;
            }
        }
        nodes_[x].parent = cur;
        while (nodes_[x].parent != kNil && heap_before(x, nodes_[x].parent)) rotate_up(x);
    }
    ++live_;
    rewrite_keys(x);
    return {x, nodes_[x].generation};
}

OrderHandle Treap::emplace_random(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(1, live_ + 1);
    return emplace_at(pick(rng));
}

void Treap::drop(OrderHandle h) {
    if (!valid(h)) throw StaleHandle("drop of stale order handle");
    std::uint32_t x = h.index;
    std::uint32_t anchor = nodes_[x].parent;
    bool anchor_right = anchor != kNil && nodes_[anchor].right == x;

    while (nodes_[x].left != kNil || nodes_[x].right != kNil) {
        std::uint32_t l = nodes_[x].left;
        std::uint32_t r = nodes_[x].right;
        std::uint32_t c = (l == kNil) ? r : (r == kNil ? l : (heap_before(l, r) ? l : r));
        rotate_up(c);
    }
    link_from_parent(x) = kNil;
    for (std::uint32_t p = nodes_[x].parent; p != kNil; p = nodes_[p].parent) pull(p);
    nodes_[x].alive = false;
    nodes_[x].key = OrderKey();
    free_.push_back(x);
    --live_;

    std::uint32_t slot = anchor == kNil ? root_ : (anchor_right ? nodes_[anchor].right : nodes_[anchor].left);
    rewrite_keys(slot);
}

bool Treap::less(OrderHandle a, OrderHandle b) const { return compare(node(a).key, node(b).key) < 0; }

std::size_t Treap::rank(OrderHandle h) const {
    node(h);
    std::uint32_t x = h.index;
    std::size_t r = size_of(nodes_[x].left) + 1;
    while (nodes_[x].parent != kNil) {
        std::uint32_t p = nodes_[x].parent;
        if (nodes_[p].right == x) r += size_of(nodes_[p].left) + 1;
        x = p;
    }
    return r;
}

OrderHandle Treap::at(std::size_t rank) const {
    if (rank < 1 || rank > live_) throw RankOutOfRange("rank " + std::to_string(rank) + " outside 1.." + std::to_string(live_));
    std::uint32_t cur = root_;
    while (true) {
        std::size_t here = size_of(nodes_[cur].left) + 1;
        if (rank == here) return {cur, nodes_[cur].generation};
        if (rank < here) {
            cur = nodes_[cur].left;
        } else {
            rank -= here;
            cur = nodes_[cur].right;
        }
    }
}

std::vector<OrderHandle> Treap::in_order() const {
    std::vector<OrderHandle> out;
    out.reserve(live_);
    std::vector<std::uint32_t> stack;
    std::uint32_t cur = root_;
    while (cur != kNil || !stack.empty()) {
        while (cur != kNil) {
            stack.push_back(cur);
            cur = nodes_[cur].left;
        }
        cur = stack.back();
        stack.pop_back();
        out.push_back({cur, nodes_[cur].generation});
        cur = nodes_[cur].right;
    }
    return out;
}

std::size_t Treap::max_depth() const {
    if (root_ == kNil) return 0;
    std::size_t best = 0;
    std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root_, 1}};
    while (!stack.empty()) {
        auto [i, d] = stack.back();
        stack.pop_back();
        best = std::max(best, d);
        if (nodes_[i].left != kNil) stack.push_back({nodes_[i].left, d + 1});
        if (nodes_[i].right != kNil) stack.push_back({nodes_[i].right, d + 1});
    }
    return best;
}

std::vector<std::string> Treap::audit() const {
    std::vector<std::string> issues;
    if (root_ != kNil && nodes_[root_].parent != kNil) issues.push_back("root has a parent");
    std::size_t count = 0;
    std::vector<std::uint32_t> stack;
    if (root_ != kNil) stack.push_back(root_);
    while (!stack.empty()) {
        std::uint32_t i = stack.back();
        stack.pop_back();
        ++count;
        const Node& n = nodes_[i];
        if (!n.alive) issues.push_back("dead node reachable");
        if (n.size != 1 + size_of(n.left) + size_of(n.right)) issues.push_back("size mismatch at node " + std::to_string(i));
        std::string expect = n.parent == kNil ? "1" : code_for_child(n.parent, nodes_[n.parent].right == i);
        if (n.key.bits() != expect) issues.push_back("stale key at node " + std::to_string(i));
        for (std::uint32_t c : {n.left, n.right}) {
            if (c == kNil) continue;
            if (nodes_[c].parent != i) issues.push_back("broken parent link at node " + std::to_string(c));
            if (heap_before(c, i)) issues.push_back("heap order violated at node " + std::to_string(c));
            stack.push_back(c);
        }
    }
    if (count != live_) issues.push_back("reachable count differs from size");
    auto seq = in_order();
    for (std::size_t i = 1; i < seq.size(); ++i)
        if (!(nodes_[seq[i - 1].index].key < nodes_[seq[i].index].key)) issues.push_back("keys out of order at position " + std::to_string(i));
    return issues;
}

}  // namespace dyntrap
