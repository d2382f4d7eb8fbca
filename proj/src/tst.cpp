#include "dyntrap/tst.h"

#include <algorithm>
#include <set>
#include <utility>

#include "dyntrap/decomposition.h"

namespace dyntrap {

const char* to_string(Pattern::Shape shape) {
    switch (shape) {
        case Pattern::Shape::Empty: return "empty";
        case Pattern::Shape::E: return "E";
        case Pattern::Shape::VELeft: return "VE-left";
        case Pattern::Shape::VERight: return "VE-right";
        case Pattern::Shape::VVE: return "VVE";
    }
    return "?";
}

Trapezoid left_of(const Trapezoid& r, const PointRef& q) { return {r.left, q, r.top, r.bottom}; }
Trapezoid right_of(const Trapezoid& r, const PointRef& q) { return {q, r.right, r.top, r.bottom}; }
Trapezoid below_of(const Trapezoid& r, const Segment* e) { return {r.left, r.right, e, r.bottom}; }
Trapezoid above_of(const Trapezoid& r, const Segment* e) { return {r.left, r.right, r.top, e}; }

Tst::Tst(const Domain& domain, std::uint64_t order_seed) : Tst(domain, Trapezoid{}, order_seed) {}

Tst::Tst(const Domain& domain, const Trapezoid& region, std::uint64_t order_seed)
    : domain_(domain), order_(order_seed) {
    root_ = make_leaf(region);
}

const SegmentEntry* Tst::entry(SegId id) const {
    auto it = registry_.find(id);
    return it == registry_.end() ? nullptr : it->second.get();
}

std::vector<const Segment*> Tst::segments() const {
    std::vector<const Segment*> out;
    out.reserve(registry_.size());
    for (const auto& [id, e] : registry_) out.push_back(&e->segment);
    std::sort(out.begin(), out.end(), [](const Segment* a, const Segment* b) { return a->id() < b->id(); });
    return out;
}

std::vector<const SegmentEntry*> Tst::entries_by_priority() const {
    std::vector<const SegmentEntry*> out;
    out.reserve(registry_.size());
    for (const auto& [id, e] : registry_) out.push_back(e.get());
    std::sort(out.begin(), out.end(), [&](const SegmentEntry* a, const SegmentEntry* b) { return before(a, b); });
    return out;
}

const SegmentEntry& Tst::register_segment(const Segment& s, std::size_t rank) {
    if (!domain_.contains_strictly(s)) throw OutOfDomainError("segment " + s.str() + " leaves the domain");
    if (registry_.count(s.id())) throw std::invalid_argument("duplicate segment id " + std::to_string(s.id()));
    overlaps_.check(s);
    OrderHandle h = order_.emplace_at(rank);
    auto e = std::make_unique<SegmentEntry>(SegmentEntry{s, h});
    const SegmentEntry& ref = *e;
    registry_.emplace(s.id(), std::move(e));
    overlaps_.add(s);
    return ref;
}

void Tst::unregister_segment(SegId id) {
    auto it = registry_.find(id);
    if (it == registry_.end()) throw UnknownSegment("unknown segment " + std::to_string(id));
    order_.drop(it->second->order);
    overlaps_.remove(it->second->segment);
    registry_.erase(it);
}

bool Tst::before(const SegmentEntry* a, const SegmentEntry* b) const {
    if (!a) return false;
    if (!b) return true;
    return order_.less(a->order, b->order);
}

NodeId Tst::make_leaf(const Trapezoid& region) {
    NodeId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = TstNode{};
    } else {
        id = static_cast<NodeId>(nodes_.size());
        nodes_.emplace_back();
    }
    nodes_[id].region = region;
    return id;
}

NodeId Tst::make_chain(const Trapezoid& region, const SegmentEntry* t, const PointRef& p1, const PointRef& p2,
                       NodeId l, NodeId a, NodeId b, NodeId r) {
    Trapezoid mid{p1 ? p1 : region.left, p2 ? p2 : region.right, region.top, region.bottom};
    NodeId head = make_leaf(mid);
    nodes_[head].kind = NodeKind::Edge;
    nodes_[head].owner = t;
    nodes_[head].minus = b;
    nodes_[head].plus = a;
    if (p2) {
        NodeId v = make_leaf(Trapezoid{p1 ? p1 : region.left, region.right, region.top, region.bottom});
        TstNode& n = nodes_[v];
        n.kind = NodeKind::Vertical;
        n.owner = t;
        n.point = p2;
        n.minus = head;
        n.plus = r;
        head = v;
    }
    if (p1) {
        NodeId v = make_leaf(region);
        TstNode& n = nodes_[v];
        n.kind = NodeKind::Vertical;
        n.owner = t;
        n.point = p1;
        n.minus = l;
        n.plus = head;
        head = v;
    }
    return head;
}

void Tst::release(NodeId id) {
    nodes_[id] = TstNode{};
    free_.push_back(id);
}

void Tst::release_chain(const Pattern& p) {
    for (int i = 0; i < p.chain_size; ++i) release(p.chain[i]);
}

void Tst::release_subtree(NodeId id) {
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        if (nodes_[v].kind != NodeKind::Leaf) {
            stack.push_back(nodes_[v].minus);
            stack.push_back(nodes_[v].plus);
        }
        release(v);
    }
}

Pattern Tst::descend(NodeId v) const {
    Pattern p;
    const TstNode& h = nodes_[v];
    if (h.kind == NodeKind::Leaf) return p;
    p.owner = h.owner;
    auto is_chain = [&](NodeId id, NodeKind kind) {
        return id != kNoNode && nodes_[id].kind == kind && nodes_[id].owner == h.owner;
    };
    auto take_edge = [&](NodeId e) {
        p.b = nodes_[e].minus;
        p.a = nodes_[e].plus;
        p.chain[p.chain_size++] = e;
    };
    p.chain[p.chain_size++] = v;
    if (h.kind == NodeKind::Edge) {
        p.shape = Pattern::Shape::E;
        p.chain_size = 0;
        take_edge(v);
        return p;
    }
    if (is_chain(h.plus, NodeKind::Vertical)) {
        const TstNode& v2 = nodes_[h.plus];
        if (!is_chain(v2.minus, NodeKind::Edge)) throw MalformedChain("second vertical cut without edge cut");
        p.shape = Pattern::Shape::VVE;
        p.p1 = h.point;
        p.l = h.minus;
        p.p2 = v2.point;
        p.r = v2.plus;
        p.chain[p.chain_size++] = h.plus;
        take_edge(v2.minus);
    } else if (is_chain(h.plus, NodeKind::Edge)) {
        p.shape = Pattern::Shape::VELeft;
        p.p1 = h.point;
        p.l = h.minus;
        take_edge(h.plus);
    } else if (is_chain(h.minus, NodeKind::Edge)) {
        p.shape = Pattern::Shape::VERight;
        p.p2 = h.point;
        p.r = h.plus;
        take_edge(h.minus);
    } else {
        throw MalformedChain("vertical cut without a same-priority edge cut");
    }
    for (NodeId c : {p.l, p.a, p.b, p.r})
        if (c != kNoNode && nodes_[c].owner == h.owner) throw MalformedChain("same-priority node below a chain");
    return p;
}

void Tst::check_domain(const Point& p) const {
    if (!domain_.contains_strictly(p)) throw OutOfDomainError("point " + p.str() + " outside the domain");
}

NodeId Tst::locate(const Point& p, const Segment* hint) {
    check_domain(p);
    NodeId v = root_;
    std::uint64_t visits = 1;
    while (nodes_[v].kind != NodeKind::Leaf) {
        const TstNode& n = nodes_[v];
        Side side = n.kind == NodeKind::Vertical ? side_of_vertical(*n.point, p, hint)
                                                 : side_of_edge(n.owner->segment, p, hint);
        v = side == Side::Minus ? n.minus : n.plus;
        ++visits;
    }
    stats_.search_visits += visits;
    return v;
}

std::vector<StabbedNode> Tst::stab(const Segment& s, const SegmentEntry* h, VisitStats& stats) const {
    std::vector<StabbedNode> out;
    std::vector<StabbedNode> stack{{root_, kNoNode, false}};
    while (!stack.empty()) {
        StabbedNode cur = stack.back();
        stack.pop_back();
        ++stats.search_visits;
        const TstNode& n = nodes_[cur.node];
        if (n.kind == NodeKind::Leaf || !before(n.owner, h)) {
            out.push_back(cur);
            continue;
        }
        bool minus_first = true;
        if (n.kind == NodeKind::Edge) minus_first = side_of_edge(n.owner->segment, s.left(), &s) == Side::Minus;
        StabbedNode first{minus_first ? n.minus : n.plus, cur.node, !minus_first};
        StabbedNode second{minus_first ? n.plus : n.minus, cur.node, minus_first};
        if (intersects(s, nodes_[second.node].region)) stack.push_back(second);
        if (intersects(s, nodes_[first.node].region)) stack.push_back(first);
    }
    return out;
}

void Tst::hang_in(const StabbedNode& where, NodeId replacement) {
    if (where.parent == kNoNode) {
        root_ = replacement;
    } else if (where.plus_side) {
        nodes_[where.parent].plus = replacement;
    } else {
        nodes_[where.parent].minus = replacement;
    }
}

VisitStats Tst::leaf_insert(const Segment& s, std::size_t rank) {
    if (rank != 0 && rank != order_.size() + 1)
        throw NotMaxPriority("leaf insertion at rank " + std::to_string(rank) + " below the maximum");
    const SegmentEntry& e = register_segment(s, order_.size() + 1);
    const Segment* seg = &e.segment;
    VisitStats st;
    auto leaves = stab(*seg, &e, st);
    std::set<SegId> crossed;
    for (const StabbedNode& at : leaves) {
        Trapezoid region = nodes_[at.node].region;
        for (const Segment* side : {region.top, region.bottom})
            if (side && !crossed.count(side->id()) && crossing_point(*seg, *side)) crossed.insert(side->id());
        auto piece = clip(*seg, region);
        const PointRef& p1 = piece->cut_left;
        const PointRef& p2 = piece->cut_right;
        Trapezoid mid{p1 ? p1 : region.left, p2 ? p2 : region.right, region.top, region.bottom};
        NodeId l = p1 ? make_leaf(left_of(region, p1)) : kNoNode;
        NodeId a = make_leaf(above_of(mid, seg));
        NodeId b = make_leaf(below_of(mid, seg));
        NodeId r = p2 ? make_leaf(right_of(region, p2)) : kNoNode;
        NodeId head = make_chain(region, &e, p1, p2, l, a, b, r);
        release(at.node);
        hang_in(at, head);
        st.update_visits += 1 + (p1 ? 1 : 0) + (p2 ? 1 : 0);
        st.affected_nodes += 1;
    }
    st.crossings = crossed.size();
    stats_ += st;
    return st;
}

std::size_t Tst::subtree_size(NodeId id) const {
    std::size_t count = 0;
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        ++count;
        if (nodes_[v].kind != NodeKind::Leaf) {
            stack.push_back(nodes_[v].minus);
            stack.push_back(nodes_[v].plus);
        }
    }
    return count;
}

TreeShape Tst::shape() const {
    TreeShape out;
    std::size_t depth_sum = 0;
    std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto [v, d] = stack.back();
        stack.pop_back();
        ++out.size;
        const TstNode& n = nodes_[v];
        if (n.kind == NodeKind::Leaf) {
            ++out.leaves;
            depth_sum += d;
            out.max_depth = std::max(out.max_depth, d);
        } else {
            stack.push_back({n.minus, d + 1});
            stack.push_back({n.plus, d + 1});
        }
    }
    out.mean_leaf_depth = static_cast<double>(depth_sum) / static_cast<double>(out.leaves);
    return out;
}

std::vector<std::string> Tst::audit(bool against_faces) const {
    std::vector<std::string> issues;
    auto report = [&](NodeId v, const std::string& what) {
        issues.push_back("node " + std::to_string(v) + " " + nodes_[v].region.str() + ": " + what);
    };
    std::vector<Trapezoid> faces;
    if (against_faces) faces = decompose(segments());

    struct Item {
        NodeId node;
        const SegmentEntry* parent_owner;
    };
    std::vector<Item> stack{{root_, nullptr}};
    std::size_t reached = 0;
    while (!stack.empty() && issues.size() < 50) {
        auto [v, parent_owner] = stack.back();
        stack.pop_back();
        ++reached;
        const TstNode& n = nodes_[v];
        if (!trapezoid_valid(n.region)) report(v, "invalid region");
        if (n.owner && parent_owner && before(n.owner, parent_owner)) report(v, "priority below its parent");
        if (n.kind == NodeKind::Leaf) {
            if (n.owner || n.minus != kNoNode || n.plus != kNoNode) report(v, "leaf with payload");
            if (against_faces && enclosing_face(faces, n.region) < 0) report(v, "leaf not inside one face");
            continue;
        }
        if (!n.owner || registry_.find(n.owner->segment.id()) == registry_.end()) {
            report(v, "cut owned by a dead segment");
            continue;
        }
        if (n.minus == kNoNode || n.plus == kNoNode) {
            report(v, "missing child");
            continue;
        }
        const Segment& t = n.owner->segment;
        if (n.kind == NodeKind::Vertical) {
            if (cmp_left_bound(n.region.left, n.point) >= 0 || cmp_right_bound(n.point, n.region.right) >= 0)
                report(v, "vertical cut outside the region");
            if (orient(t.left(), t.right(), *n.point) != 0) report(v, "cut point off its segment");
            if (!same_region(nodes_[n.minus].region, left_of(n.region, n.point))) report(v, "minus region mismatch");
            if (!same_region(nodes_[n.plus].region, right_of(n.region, n.point))) report(v, "plus region mismatch");
        } else {
            if (!spans(t, n.region)) report(v, "edge cut does not span the region");
            if (!same_region(nodes_[n.minus].region, below_of(n.region, &t))) report(v, "minus region mismatch");
            if (!same_region(nodes_[n.plus].region, above_of(n.region, &t))) report(v, "plus region mismatch");
        }
        if (n.owner != parent_owner) {
            try {
                Pattern p = descend(v);
                for (NodeId c : {p.l, p.a, p.b, p.r})
                    if (c != kNoNode && !before(n.owner, nodes_[c].owner)) report(c, "priority not above its chain");
            } catch (const MalformedChain& ex) {
                report(v, ex.what());
            }
        }
        stack.push_back({n.minus, n.owner});
        stack.push_back({n.plus, n.owner});
    }
    if (issues.empty() && reached != size()) issues.push_back("unreachable nodes in the arena");
    for (const auto& [id, e] : registry_)
        if (!order_.valid(e->order)) issues.push_back("segment " + std::to_string(id) + " lost its order handle");
    return issues;
}

bool structural_equal(const Tst& a, NodeId ua, const Tst& b, NodeId ub) {
    std::vector<std::pair<NodeId, NodeId>> stack{{ua, ub}};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const TstNode& m = a.node(x);
        const TstNode& n = b.node(y);
        if (m.kind != n.kind) return false;
        if (m.kind == NodeKind::Leaf) continue;
        if (m.owner->segment.id() != n.owner->segment.id()) return false;
        if (m.kind == NodeKind::Vertical && !(*m.point == *n.point)) return false;
        stack.push_back({m.minus, n.minus});
        stack.push_back({m.plus, n.plus});
    }
    return true;
}

bool structural_equal(const Tst& a, const Tst& b) { return structural_equal(a, a.root(), b, b.root()); }

void build_ric(Tst& t, const std::vector<Segment>& ascending) {
    for (const Segment& s : ascending) t.leaf_insert(s);
}

}  // namespace dyntrap
