#pragma once

#include <array>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dyntrap/geometry.h"
#include "dyntrap/order.h"
#include "dyntrap/tst.h"

namespace dyntrap {

class EmptyStructure : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Up to two adjacent leaves across one vertical wall.
struct LeafLinks {
    std::array<NodeId, 2> ids{kNoNode, kNoNode};

    int count() const { return (ids[0] != kNoNode) + (ids[1] != kNoNode); }
    bool contains(NodeId id) const { return id != kNoNode && (ids[0] == id || ids[1] == id); }
    void add(NodeId id);
    void remove(NodeId id);
    void clear() { ids = {kNoNode, kNoNode}; }
};

struct TsdNode {
    Trapezoid region;
    NodeKind kind = NodeKind::Leaf;
    const SegmentEntry* owner = nullptr;
    PointRef point;
    NodeId minus = kNoNode;
    NodeId plus = kNoNode;
    std::uint32_t parents = 0;
    LeafLinks left;   // leaves only
    LeafLinks right;  // leaves only
};

/// Trapezoidal search DAG: a history structure whose leaves are exactly the
/// faces of the trapezoidal decomposition. Segments are added at the maximum
/// priority and removed in reverse order.
class Tsd {
public:
    explicit Tsd(const Domain& domain, std::uint64_t order_seed = 1);

    Tsd(const Tsd&) = delete;
    Tsd& operator=(const Tsd&) = delete;

    const Domain& domain() const { return domain_; }
    NodeId root() const { return root_; }
    const TsdNode& node(NodeId id) const { return nodes_[id]; }
    TsdNode& node(NodeId id) { return nodes_[id]; }
    std::size_t segment_count() const { return registry_.size(); }
    std::vector<const Segment*> segments() const;
    const Treap& order() const { return order_; }

    /// Inserts s above every live priority. A nonzero rank must equal the
    /// new maximum.
    VisitStats leaf_insert(const Segment& s, std::size_t rank = 0);
    NodeId locate(const Point& p, const Segment* hint = nullptr);
    /// Removes the most recently inserted segment and returns its id.
    SegId decremental_delete_max();

    std::vector<NodeId> leaves() const;
    std::size_t size() const { return nodes_.size() - free_.size(); }
    TreeShape shape() const;

    std::vector<std::string> audit() const;

    VisitStats& stats() { return stats_; }

private:
    struct InsertRecord {
        SegId id;
        std::vector<NodeId> heads;
        std::vector<NodeId> created;
        std::vector<std::pair<NodeId, std::pair<LeafLinks, LeafLinks>>> saved_links;
    };

    NodeId alloc(const Trapezoid& region);
    void release(NodeId id);
    NodeId locate_counted(const Point& p, const Segment* hint, std::uint64_t& visits) const;
    NodeId locate_past_wall(const Point& p, const Segment& s, std::uint64_t& visits) const;
    bool adjacent(NodeId left, NodeId right) const;
    void relink(const std::vector<NodeId>& old_leaves, const std::set<NodeId>& neighbors,
                const std::vector<NodeId>& fresh);

    Domain domain_;
    std::vector<TsdNode> nodes_;
    std::vector<NodeId> free_;
    NodeId root_ = kNoNode;
    Treap order_;
    std::unordered_map<SegId, std::unique_ptr<SegmentEntry>> registry_;
    OverlapIndex overlaps_;
    std::vector<InsertRecord> history_;
    VisitStats stats_;
};

/// Isomorphic DAGs with equal cuts and owners; shared nodes must map to
/// shared nodes.
bool structural_equal(const Tsd& a, const Tsd& b);

}  // namespace dyntrap
