#include "dyntrap/dynamic.h"

#include <set>

namespace dyntrap {

namespace {

enum class Relation { Below, Above, Rising, Falling };

// Position of the owner t of a chain against the line of c, restricted to
// the piece [lo, hi) of t that the chain cuts. Rising and Falling mean that
// t crosses c inside the piece at x.
Relation relate(const Segment& t, const Segment& c, const PointRef& lo, const PointRef& hi, PointRef& x) {
    int o1 = orient(c.left(), c.right(), t.left());
    int o2 = orient(c.left(), c.right(), t.right());
    if (o1 == 0 && o2 == 0) throw OverlapError("segment " + t.str() + " is collinear with " + c.str());
    if (o1 * o2 >= 0) return o1 + o2 > 0 ? Relation::Above : Relation::Below;
    auto cross = std::make_shared<const Point>(line_crossing(t, c));
    if (lo && cmp_sheared(*cross, *lo) <= 0) return o2 > 0 ? Relation::Above : Relation::Below;
    if (hi && cmp_sheared(*cross, *hi) >= 0) return o1 > 0 ? Relation::Above : Relation::Below;
    x = std::move(cross);
    return o1 < 0 ? Relation::Rising : Relation::Falling;
}

class Rebuilder {
public:
    Rebuilder(Tst& t, VisitStats& st) : t_(t), st_(st) {}

    std::set<SegId> crossed;

    Trapezoid region(NodeId u) const { return t_.node(u).region; }

    std::pair<NodeId, NodeId> v_split(NodeId u, const PointRef& q) {
        ++st_.update_visits;
        Trapezoid r = region(u);
        if (t_.node(u).kind == NodeKind::Leaf) {
            t_.release(u);
            return {t_.make_leaf(left_of(r, q)), t_.make_leaf(right_of(r, q))};
        }
        Pattern p = t_.descend(u);
        t_.release_chain(p);
        const SegmentEntry* owner = p.owner;
        auto c1 = p.p1 ? cmp_sheared(*q, *p.p1) : std::strong_ordering::greater;
        if (c1 < 0) {
            auto [lm, lp] = v_split(p.l, q);
            return {lm, t_.make_chain(right_of(r, q), owner, p.p1, p.p2, lp, p.a, p.b, p.r)};
        }
        if (c1 == 0) return {p.l, t_.make_chain(right_of(r, q), owner, nullptr, p.p2, kNoNode, p.a, p.b, p.r)};
        auto c2 = p.p2 ? cmp_sheared(*q, *p.p2) : std::strong_ordering::less;
        if (c2 < 0) {
            auto [am, ap] = v_split(p.a, q);
            auto [bm, bp] = v_split(p.b, q);
            return {t_.make_chain(left_of(r, q), owner, p.p1, nullptr, p.l, am, bm, kNoNode),
                    t_.make_chain(right_of(r, q), owner, nullptr, p.p2, kNoNode, ap, bp, p.r)};
        }
        if (c2 == 0) return {t_.make_chain(left_of(r, q), owner, p.p1, nullptr, p.l, p.a, p.b, kNoNode), p.r};
        auto [rm, rp] = v_split(p.r, q);
        return {t_.make_chain(left_of(r, q), owner, p.p1, p.p2, p.l, p.a, p.b, rm), rp};
    }

    NodeId v_join(NodeId m, NodeId p, const PointRef& q) {
        ++st_.update_visits;
        Trapezoid rm = region(m);
        Trapezoid rp = region(p);
        Trapezoid r{rm.left, rp.right, rm.top, rm.bottom};
        const SegmentEntry* tm = t_.node(m).owner;
        const SegmentEntry* tp = t_.node(p).owner;
        if (!tm && !tp) {
            t_.release(m);
            t_.release(p);
            return t_.make_leaf(r);
        }
        if (tm == tp) {
            Pattern pm = t_.descend(m);
            Pattern pp = t_.descend(p);
            t_.release_chain(pm);
            t_.release_chain(pp);
            NodeId a = v_join(pm.a, pp.a, q);
            NodeId b = v_join(pm.b, pp.b, q);
            return t_.make_chain(r, tm, pm.p1, pp.p2, pm.l, a, b, pp.r);
        }
        if (t_.before(tm, tp)) {
            Pattern pm = t_.descend(m);
            t_.release_chain(pm);
            if (pm.p2) return t_.make_chain(r, tm, pm.p1, pm.p2, pm.l, pm.a, pm.b, v_join(pm.r, p, q));
            return t_.make_chain(r, tm, pm.p1, q, pm.l, pm.a, pm.b, p);
        }
        Pattern pp = t_.descend(p);
        t_.release_chain(pp);
        if (pp.p1) return t_.make_chain(r, tp, pp.p1, pp.p2, v_join(m, pp.l, q), pp.a, pp.b, pp.r);
        return t_.make_chain(r, tp, q, pp.p2, m, pp.a, pp.b, pp.r);
    }

    std::pair<NodeId, NodeId> e_split(NodeId u, const SegmentEntry& c) {
        ++st_.update_visits;
        const Segment* cs = &c.segment;
        Trapezoid r = region(u);
        Trapezoid below = below_of(r, cs);
        Trapezoid above = above_of(r, cs);
        if (t_.node(u).kind == NodeKind::Leaf) {
            t_.release(u);
            return {t_.make_leaf(below), t_.make_leaf(above)};
        }
        Pattern p = t_.descend(u);
        t_.release_chain(p);
        const SegmentEntry* owner = p.owner;
        PointRef x;
        Relation rel = relate(owner->segment, *cs, p.p1 ? p.p1 : r.left, p.p2 ? p.p2 : r.right, x);
        NodeId lm = kNoNode, lp = kNoNode, rm = kNoNode, rp = kNoNode;
        auto split_sides = [&] {
            if (p.l != kNoNode) std::tie(lm, lp) = e_split(p.l, c);
            if (p.r != kNoNode) std::tie(rm, rp) = e_split(p.r, c);
        };
        auto join3 = [&](NodeId left, NodeId mid, NodeId right) {
            if (p.p2) mid = v_join(mid, right, p.p2);
            if (p.p1) mid = v_join(left, mid, p.p1);
            return mid;
        };
        if (rel == Relation::Above) {
            split_sides();
            auto [bm, bp] = e_split(p.b, c);
            NodeId up = t_.make_chain(above, owner, p.p1, p.p2, lp, p.a, bp, rp);
            return {join3(lm, bm, rm), up};
        }
        if (rel == Relation::Below) {
            split_sides();
            auto [am, ap] = e_split(p.a, c);
            NodeId down = t_.make_chain(below, owner, p.p1, p.p2, lm, am, p.b, rm);
            return {down, join3(lp, ap, rp)};
        }
        crossed.insert(owner->segment.id());
        auto [al, ar] = v_split(p.a, x);
        auto [bl, br] = v_split(p.b, x);
        split_sides();
        if (rel == Relation::Rising) {
            auto [alm, alp] = e_split(al, c);
            auto [brm, brp] = e_split(br, c);
            NodeId tail = p.p2 ? v_join(brm, rm, p.p2) : brm;
            NodeId head = p.p1 ? v_join(lp, alp, p.p1) : alp;
            return {t_.make_chain(below, owner, p.p1, x, lm, alm, bl, tail),
                    t_.make_chain(above, owner, x, p.p2, head, ar, brp, rp)};
        }
        auto [blm, blp] = e_split(bl, c);
        auto [arm, arp] = e_split(ar, c);
        NodeId tail = p.p2 ? v_join(arp, rp, p.p2) : arp;
        NodeId head = p.p1 ? v_join(lm, blm, p.p1) : blm;
        return {t_.make_chain(below, owner, x, p.p2, head, arm, br, rm),
                t_.make_chain(above, owner, p.p1, x, lp, al, blp, tail)};
    }

    NodeId e_join(NodeId m, NodeId p, const SegmentEntry& c) {
        ++st_.update_visits;
        Trapezoid rm = region(m);
        Trapezoid rp = region(p);
        Trapezoid r{rm.left, rm.right, rp.top, rm.bottom};
        const SegmentEntry* tm = t_.node(m).owner;
        const SegmentEntry* tp = t_.node(p).owner;
        if (!tm && !tp) {
            t_.release(m);
            t_.release(p);
            return t_.make_leaf(r);
        }
        if (tm == tp) {
            Pattern pm = t_.descend(m);
            Pattern pp = t_.descend(p);
            t_.release_chain(pm);
            t_.release_chain(pp);
            if (pm.p2 && pp.p1 && *pm.p2 == *pp.p1) {
                // Rising: the owner leaves the lower half through c.
                const PointRef& x = pm.p2;
                const PointRef& p1 = pm.p1;
                const PointRef& p2 = pp.p2;
                NodeId brm = pm.r, rm_ = kNoNode, lp = kNoNode, alp = pp.l;
                if (p2) std::tie(brm, rm_) = v_split(pm.r, p2);
                if (p1) std::tie(lp, alp) = v_split(pp.l, p1);
                NodeId l = p1 ? e_join(pm.l, lp, c) : kNoNode;
                NodeId al = e_join(pm.a, alp, c);
                NodeId br = e_join(brm, pp.b, c);
                NodeId rr = p2 ? e_join(rm_, pp.r, c) : kNoNode;
                NodeId a = v_join(al, pp.a, x);
                NodeId b = v_join(pm.b, br, x);
                return t_.make_chain(r, tm, p1, p2, l, a, b, rr);
            }
            const PointRef& x = pp.p2;
            const PointRef& p1 = pp.p1;
            const PointRef& p2 = pm.p2;
            NodeId arp = pp.r, rp_ = kNoNode, lm = kNoNode, blm = pm.l;
            if (p2) std::tie(arp, rp_) = v_split(pp.r, p2);
            if (p1) std::tie(lm, blm) = v_split(pm.l, p1);
            NodeId l = p1 ? e_join(lm, pp.l, c) : kNoNode;
            NodeId bl = e_join(blm, pp.b, c);
            NodeId ar = e_join(pm.a, arp, c);
            NodeId rr = p2 ? e_join(pm.r, rp_, c) : kNoNode;
            NodeId a = v_join(pp.a, ar, x);
            NodeId b = v_join(bl, pm.b, x);
            return t_.make_chain(r, tm, p1, p2, l, a, b, rr);
        }
        bool lower_first = t_.before(tm, tp);
        Pattern keep = t_.descend(lower_first ? m : p);
        t_.release_chain(keep);
        NodeId rest = lower_first ? p : m;
        NodeId sl = kNoNode, sr = kNoNode;
        if (keep.p1) std::tie(sl, rest) = v_split(rest, keep.p1);
        if (keep.p2) std::tie(rest, sr) = v_split(rest, keep.p2);
        auto join = [&](NodeId own, NodeId other) {
            if (own == kNoNode) return kNoNode;
            return lower_first ? e_join(own, other, c) : e_join(other, own, c);
        };
        NodeId l = join(keep.l, sl);
        NodeId rr = join(keep.r, sr);
        if (lower_first) return t_.make_chain(r, keep.owner, keep.p1, keep.p2, l, join(keep.a, rest), keep.b, rr);
        return t_.make_chain(r, keep.owner, keep.p1, keep.p2, l, keep.a, join(keep.b, rest), rr);
    }

private:
    Tst& t_;
    VisitStats& st_;
};

}  // namespace

AffectedList find_affected(Tst& t, const Segment& s, const SegmentEntry* h, VisitStats& stats) {
    AffectedList out;
    for (const StabbedNode& at : t.stab(s, h, stats)) {
        auto piece = clip(s, t.node(at.node).region);
        out.push_back({at, piece ? *piece : Piece{}});
    }
    return out;
}

std::pair<NodeId, NodeId> v_partition(Tst& t, NodeId u, const PointRef& q, VisitStats& stats) {
    const Trapezoid& r = t.node(u).region;
    if (cmp_left_bound(r.left, q) >= 0 || cmp_right_bound(q, r.right) >= 0)
        throw std::logic_error("vertical cut misses the region");
    Rebuilder rb(t, stats);
    return rb.v_split(u, q);
}

NodeId v_merge(Tst& t, NodeId minus, NodeId plus, const PointRef& q, VisitStats& stats) {
    const Trapezoid& a = t.node(minus).region;
    const Trapezoid& b = t.node(plus).region;
    if (!same_point(a.right, q) || !same_point(b.left, q) || !same_segment(a.top, b.top) ||
        !same_segment(a.bottom, b.bottom))
        throw std::logic_error("regions do not meet along the vertical cut");
    Rebuilder rb(t, stats);
    return rb.v_join(minus, plus, q);
}

std::pair<NodeId, NodeId> partition(Tst& t, NodeId u, const SegmentEntry& c, VisitStats& stats) {
    if (!spans(c.segment, t.node(u).region)) throw std::logic_error("edge cut does not span the region");
    Rebuilder rb(t, stats);
    return rb.e_split(u, c);
}

NodeId merge(Tst& t, NodeId minus, NodeId plus, const SegmentEntry& c, VisitStats& stats) {
    const Trapezoid& a = t.node(minus).region;
    const Trapezoid& b = t.node(plus).region;
    if (!same_segment(a.top, &c.segment) || !same_segment(b.bottom, &c.segment) || !same_point(a.left, b.left) ||
        !same_point(a.right, b.right))
        throw std::logic_error("regions do not meet along the edge cut");
    Rebuilder rb(t, stats);
    return rb.e_join(minus, plus, c);
}

VisitStats insert_at(Tst& t, const Segment& s, std::size_t rank) {
    const SegmentEntry& e = t.register_segment(s, rank);
    VisitStats st;
    AffectedList affected = find_affected(t, e.segment, &e, st);
    Rebuilder rb(t, st);
    for (const AffectedNode& item : affected) {
        NodeId u = item.at.node;
        Trapezoid r = t.node(u).region;
        st.affected_nodes += t.subtree_size(u);
        for (const Segment* side : {r.top, r.bottom})
            if (side && crossing_point(e.segment, *side)) rb.crossed.insert(side->id());
        const PointRef& p1 = item.piece.cut_left;
        const PointRef& p2 = item.piece.cut_right;
        NodeId l = kNoNode, rest = u, rr = kNoNode;
        if (p1) std::tie(l, rest) = rb.v_split(rest, p1);
        if (p2) std::tie(rest, rr) = rb.v_split(rest, p2);
        auto [b, a] = rb.e_split(rest, e);
        t.hang_in(item.at, t.make_chain(r, &e, p1, p2, l, a, b, rr));
    }
    st.crossings = rb.crossed.size();
    t.stats() += st;
    return st;
}

VisitStats insert(Tst& t, const Segment& s, std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> pick(1, t.segment_count() + 1);
    return insert_at(t, s, pick(rng));
}

VisitStats erase(Tst& t, SegId id) {
    const SegmentEntry* e = t.entry(id);
    if (!e) throw UnknownSegment("unknown segment " + std::to_string(id));
    VisitStats st;
    AffectedList heads = find_affected(t, e->segment, e, st);
    Rebuilder rb(t, st);
    for (const AffectedNode& item : heads) {
        Pattern p = t.descend(item.at.node);
        if (p.owner != e) throw MalformedChain("segment search stopped outside the segment's chains");
        t.release_chain(p);
        NodeId m = rb.e_join(p.b, p.a, *e);
        if (p.p2) m = rb.v_join(m, p.r, p.p2);
        if (p.p1) m = rb.v_join(p.l, m, p.p1);
        st.affected_nodes += t.subtree_size(m);
        t.hang_in(item.at, m);
    }
    t.unregister_segment(id);
    t.stats() += st;
    return st;
}

}  // namespace dyntrap
