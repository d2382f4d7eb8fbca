#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dyntrap/geometry.h"
#include "dyntrap/order.h"

namespace dyntrap {

class MalformedChain : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NotMaxPriority : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class UnknownSegment : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = UINT32_MAX;

enum class NodeKind : std::uint8_t { Leaf, Vertical, Edge };

/// A live segment together with its position in the priority order.
struct SegmentEntry {
    Segment segment;
    OrderHandle order;
};

struct TstNode {
    Trapezoid region;
    NodeKind kind = NodeKind::Leaf;
    const SegmentEntry* owner = nullptr;  // destroying segment; null for leaves
    PointRef point;                       // vertical cuts only
    NodeId minus = kNoNode;
    NodeId plus = kNoNode;
};

struct VisitStats {
    std::uint64_t search_visits = 0;
    std::uint64_t update_visits = 0;
    std::uint64_t affected_nodes = 0;  // nodes in the subtrees below the affected list
    std::uint64_t crossings = 0;       // segments crossed by the updated one

    VisitStats& operator+=(const VisitStats& o) {
        search_visits += o.search_visits;
        update_visits += o.update_visits;
        affected_nodes += o.affected_nodes;
        crossings += o.crossings;
        return *this;
    }
};

/// The same-priority chain below a node: cut points and the up to four
/// children (left, above, below, right) in the order of the cuts.
struct Pattern {
    enum class Shape : std::uint8_t { Empty, E, VELeft, VERight, VVE };

    Shape shape = Shape::Empty;
    const SegmentEntry* owner = nullptr;
    PointRef p1;
    PointRef p2;
    NodeId l = kNoNode;
    NodeId a = kNoNode;
    NodeId b = kNoNode;
    NodeId r = kNoNode;
    NodeId chain[3] = {kNoNode, kNoNode, kNoNode};
    int chain_size = 0;
};

const char* to_string(Pattern::Shape shape);

/// A node reached by a segment search, with the link that holds it.
struct StabbedNode {
    NodeId node = kNoNode;
    NodeId parent = kNoNode;
    bool plus_side = false;
};

struct TreeShape {
    std::size_t size = 0;
    std::size_t leaves = 0;
    std::size_t max_depth = 0;
    double mean_leaf_depth = 0.0;
};

/// Trapezoidal search tree over a set of segments with a dynamic priority
/// order. Every node stores its region explicitly.
class Tst {
public:
    explicit Tst(const Domain& domain, std::uint64_t order_seed = 1);
    /// Tree over a sub-region; its bounding segments must outlive the tree.
    Tst(const Domain& domain, const Trapezoid& region, std::uint64_t order_seed = 1);

    Tst(const Tst&) = delete;
    Tst& operator=(const Tst&) = delete;

    const Domain& domain() const { return domain_; }
    NodeId root() const { return root_; }
    NodeId& root_slot() { return root_; }

    const TstNode& node(NodeId id) const { return nodes_[id]; }
    TstNode& node(NodeId id) { return nodes_[id]; }

    Treap& order() { return order_; }
    const Treap& order() const { return order_; }

    std::size_t segment_count() const { return registry_.size(); }
    const SegmentEntry* entry(SegId id) const;
    std::vector<const Segment*> segments() const;
    /// Live segments sorted by priority.
    std::vector<const SegmentEntry*> entries_by_priority() const;

    /// Validates s against the domain and the live segments, then registers
    /// it at 1-based priority `rank`.
    const SegmentEntry& register_segment(const Segment& s, std::size_t rank);
    void unregister_segment(SegId id);

    /// Strict priority order; a null owner stands for +inf.
    bool before(const SegmentEntry* a, const SegmentEntry* b) const;

    /// Inserts s as the new maximum priority below the current leaves. A
    /// nonzero rank must equal the new maximum.
    VisitStats leaf_insert(const Segment& s, std::size_t rank = 0);

    /// Topmost nodes whose region s intersects and whose priority is not
    /// below h, in the order s stabs them. Visits are added to `stats`.
    std::vector<StabbedNode> stab(const Segment& s, const SegmentEntry* h, VisitStats& stats) const;
    /// Hangs `replacement` into the link that held a stabbed node.
    void hang_in(const StabbedNode& where, NodeId replacement);

    NodeId locate(const Point& p, const Segment* hint = nullptr);
    Pattern descend(NodeId v) const;

    NodeId make_leaf(const Trapezoid& region);
    /// Builds the destruction chain of t over `region`.
    NodeId make_chain(const Trapezoid& region, const SegmentEntry* t, const PointRef& p1, const PointRef& p2, NodeId l,
                      NodeId a, NodeId b, NodeId r);
    void release(NodeId id);
    void release_chain(const Pattern& p);
    void release_subtree(NodeId id);

    std::size_t subtree_size(NodeId id) const;
    TreeShape shape() const;
    std::size_t size() const { return nodes_.size() - free_.size(); }

    /// Empty when every structural invariant holds. With `against_faces` the
    /// leaves are also checked against a brute-force decomposition.
    std::vector<std::string> audit(bool against_faces = true) const;

    VisitStats& stats() { return stats_; }
    const VisitStats& stats() const { return stats_; }

private:
    void check_domain(const Point& p) const;

    Domain domain_;
    std::vector<TstNode> nodes_;
    std::vector<NodeId> free_;
    NodeId root_ = kNoNode;
    Treap order_;
    std::unordered_map<SegId, std::unique_ptr<SegmentEntry>> registry_;
    OverlapIndex overlaps_;
    VisitStats stats_;
};

/// Node regions split by a vertical cut through q or by the line of e.
Trapezoid left_of(const Trapezoid& r, const PointRef& q);
Trapezoid right_of(const Trapezoid& r, const PointRef& q);
Trapezoid below_of(const Trapezoid& r, const Segment* e);
Trapezoid above_of(const Trapezoid& r, const Segment* e);

/// Same kinds, cut points and owners at every node, recursively.
bool structural_equal(const Tst& a, const Tst& b);
bool structural_equal(const Tst& a, NodeId ua, const Tst& b, NodeId ub);

/// Leaf-level insertion of all segments in the given (ascending) order.
void build_ric(Tst& t, const std::vector<Segment>& ascending);

}  // namespace dyntrap
