#include <gtest/gtest.h>

#include <optional>
#include <set>

#include "dyntrap/decomposition.h"
#include "dyntrap/dynamic.h"
#include "support.h"

using namespace dyntrap;
using namespace dyntrap::testing;

namespace {

std::vector<StabbedNode> all_nodes(const Tst& t) {
    std::vector<StabbedNode> out;
    std::vector<StabbedNode> stack{{t.root(), kNoNode, false}};
    while (!stack.empty()) {
        StabbedNode at = stack.back();
        stack.pop_back();
        out.push_back(at);
        const TstNode& n = t.node(at.node);
        if (n.kind == NodeKind::Leaf) continue;
        stack.push_back({n.minus, at.node, false});
        stack.push_back({n.plus, at.node, true});
    }
    return out;
}

// A point strictly inside the x-range of r (sheared), drawn on a 1/4 grid.
std::optional<PointRef> cut_point_inside(const Trapezoid& r, int grid, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> c(1, 4 * grid);
    for (int tries = 0; tries < 50; ++tries) {
        PointRef q = make_point(Rational(c(rng), 4), Rational(c(rng), 4));
        if (cmp_left_bound(r.left, q) < 0 && cmp_right_bound(q, r.right) < 0) return q;
    }
    return std::nullopt;
}

// RIC insertion into a tree restricted to `region` is the reference for what
// a split subtree must look like.
void expect_matches_restricted_ric(const Tst& t, NodeId u, const std::vector<Segment>& ascending) {
    Tst ref(t.domain(), t.node(u).region);
    for (const Segment& s : ascending) ref.leaf_insert(s);
    EXPECT_TRUE(structural_equal(t, u, ref, ref.root()));
}

}  // namespace

TEST(FindAffected, EmptyTreeGivesRoot) {
    Tst t(grid_domain(10));
    const SegmentEntry& e = t.register_segment(Segment(0, Point(1, 1), Point(5, 3)), 1);
    VisitStats st;
    AffectedList list = find_affected(t, e.segment, &e, st);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].at.node, t.root());
    EXPECT_EQ(list[0].at.parent, kNoNode);
}

TEST(FindAffected, MinimumRankGivesRoot) {
    Tst t(grid_domain(10));
    t.leaf_insert(Segment(0, Point(1, 1), Point(5, 3)));
    const SegmentEntry& e = t.register_segment(Segment(1, Point(6, 6), Point(9, 8)), 1);
    VisitStats st;
    AffectedList list = find_affected(t, e.segment, &e, st);
    ASSERT_EQ(list.size(), 1u);
    EXPECT_EQ(list[0].at.node, t.root());
}

// Oracle: a full traversal collecting the topmost nodes that s meets and
// whose owner does not come before h.
TEST(FindAffected, MatchesBruteForceTraversal) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        std::mt19937_64 rng(seed);
        auto segs = grid_segments(rng, 12, 16);
        Tst t(grid_domain(12), seed);
        for (std::size_t i = 0; i + 1 < segs.size(); ++i) insert(t, segs[i], rng);
        std::size_t rank = std::uniform_int_distribution<std::size_t>(1, t.segment_count() + 1)(rng);
        const SegmentEntry& e = t.register_segment(segs.back(), rank);
        VisitStats st;
        AffectedList list = find_affected(t, e.segment, &e, st);

        std::set<NodeId> expected;
        std::vector<NodeId> stack{t.root()};
        while (!stack.empty()) {
            NodeId v = stack.back();
            stack.pop_back();
            const TstNode& n = t.node(v);
            if (!intersects(e.segment, n.region)) continue;
            if (!t.before(n.owner, &e)) {
                expected.insert(v);
                continue;
            }
            stack.push_back(n.minus);
            stack.push_back(n.plus);
        }
        std::set<NodeId> got;
        for (const AffectedNode& item : list) {
            got.insert(item.at.node);
            EXPECT_TRUE(intersects(e.segment, t.node(item.at.node).region));
        }
        EXPECT_EQ(got.size(), list.size());
        EXPECT_EQ(got, expected) << "seed " << seed;
        EXPECT_GT(st.search_visits, 0u);
        t.unregister_segment(segs.back().id());
    }
}

TEST(VPartition, LeafStaysLeaves) {
    Tst t(grid_domain(10));
    VisitStats st;
    auto [m, p] = v_partition(t, t.root(), make_point(4, 4), st);
    EXPECT_EQ(t.node(m).kind, NodeKind::Leaf);
    EXPECT_EQ(t.node(p).kind, NodeKind::Leaf);
    EXPECT_EQ(*t.node(m).region.right, Point(4, 4));
    EXPECT_EQ(*t.node(p).region.left, Point(4, 4));
}

TEST(VPartition, SplitBetweenEndpointsGivesTwoVeHalves) {
    Tst t(grid_domain(10));
    Segment s(0, Point(2, 3), Point(6, 5));
    t.leaf_insert(s);
    VisitStats st;
    auto [m, p] = v_partition(t, t.root(), make_point(4, 9), st);
    EXPECT_EQ(t.subtree_size(m), 5u);
    EXPECT_EQ(t.subtree_size(p), 5u);
    EXPECT_EQ(t.descend(m).shape, Pattern::Shape::VELeft);
    EXPECT_EQ(t.descend(p).shape, Pattern::Shape::VERight);
    expect_matches_restricted_ric(t, m, {s});
    expect_matches_restricted_ric(t, p, {s});

    NodeId joined = v_merge(t, m, p, t.node(m).region.right, st);
    t.hang_in({t.root(), kNoNode, false}, joined);
    Tst ref(grid_domain(10));
    ref.leaf_insert(s);
    EXPECT_TRUE(structural_equal(t, ref));
    EXPECT_TRUE(t.audit().empty());
}

TEST(VPartition, SplitLeftOfSegmentRecursesLeftOnly) {
    Tst t(grid_domain(10));
    Segment s(0, Point(4, 3), Point(8, 5));
    t.leaf_insert(s);
    VisitStats st;
    auto [m, p] = v_partition(t, t.root(), make_point(2, 2), st);
    EXPECT_EQ(t.node(m).kind, NodeKind::Leaf);
    EXPECT_EQ(t.subtree_size(p), 7u);
    expect_matches_restricted_ric(t, p, {s});
}

TEST(VMerge, LeafMinusTakesPlusVerbatim) {
    Tst t(grid_domain(10));
    Segment s(0, Point(4, 3), Point(8, 5));
    t.leaf_insert(s);
    VisitStats st;
    auto [m, p] = v_partition(t, t.root(), make_point(2, 2), st);
    NodeId v = v_merge(t, m, p, make_point(2, 2), st);
    t.hang_in({t.root(), kNoNode, false}, v);
    Tst ref(grid_domain(10));
    ref.leaf_insert(s);
    EXPECT_TRUE(structural_equal(t, ref));
}

TEST(VMerge, RejectsRegionsThatDoNotMeet) {
    Tst t(grid_domain(10));
    VisitStats st;
    auto [m, p] = v_partition(t, t.root(), make_point(4, 4), st);
    EXPECT_THROW(v_merge(t, m, p, make_point(5, 5), st), std::logic_error);
    EXPECT_THROW(v_partition(t, m, make_point(6, 6), st), std::logic_error);
}

TEST(Partition, LeafStops) {
    Tst outer(grid_domain(10));
    const Trapezoid& whole = outer.node(outer.root()).region;
    Trapezoid slab = left_of(right_of(whole, make_point(2, 2)), make_point(8, 3));
    Tst t(grid_domain(10), slab);
    const SegmentEntry& c = t.register_segment(Segment(0, Point(2, 2), Point(8, 3)), 1);
    VisitStats st;
    auto [m, p] = partition(t, t.root(), c, st);
    EXPECT_EQ(t.node(m).kind, NodeKind::Leaf);
    EXPECT_EQ(t.node(p).kind, NodeKind::Leaf);
    EXPECT_TRUE(same_segment(t.node(m).region.top, &c.segment));
    EXPECT_TRUE(same_segment(t.node(p).region.bottom, &c.segment));
}

TEST(Partition, ParallelCutBelowEdge) {
    Tst t(grid_domain(10));
    Segment e(0, Point(1, 6), Point(9, 6));
    t.leaf_insert(e);
    Pattern chain = t.descend(t.root());
    NodeId slab = t.node(chain.chain[1]).minus;  // the edge node between both vertical cuts
    ASSERT_EQ(t.node(slab).kind, NodeKind::Edge);
    const SegmentEntry& c = t.register_segment(Segment(1, Point(Rational(1, 2), Rational(2)), Point(Rational(19, 2), Rational(2))), 1);
    VisitStats st;
    StabbedNode where{slab, chain.chain[1], false};
    auto [m, p] = partition(t, slab, c, st);
    EXPECT_EQ(t.node(m).kind, NodeKind::Leaf);
    EXPECT_EQ(t.node(p).kind, NodeKind::Edge);
    EXPECT_TRUE(same_segment(t.node(p).owner ? &t.node(p).owner->segment : nullptr, &e));
    NodeId back = merge(t, m, p, c, st);
    t.hang_in(where, back);
    t.unregister_segment(1);
    Tst ref(grid_domain(10));
    ref.leaf_insert(e);
    EXPECT_TRUE(structural_equal(t, ref));
}

TEST(Partition, CrossingCutMatchesRestrictedRic) {
    Tst t(grid_domain(10));
    Segment e(0, Point(1, 3), Point(9, 7));
    t.leaf_insert(e);
    Pattern chain = t.descend(t.root());
    NodeId slab = t.node(chain.chain[1]).minus;
    const SegmentEntry& c = t.register_segment(Segment(1, Point(Rational(1, 2), Rational(8)), Point(Rational(19, 2), Rational(2))), 1);
    VisitStats st;
    auto [m, p] = partition(t, slab, c, st);
    expect_matches_restricted_ric(t, m, {e});
    expect_matches_restricted_ric(t, p, {e});
    EXPECT_GE(st.update_visits, 1u);
}

// v_merge after v_partition, and merge after partition, restore every
// sampled subtree.
TEST(Primitives, RoundTripsOnRandomSubtrees) {
    int vertical = 0, edge = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        std::mt19937_64 rng(seed);
        int grid = seed % 2 ? 8 : 30;
        auto segs = grid_segments(rng, grid, 12);
        Tst t(grid_domain(grid), seed), ref(grid_domain(grid), seed);
        build_ric(t, segs);
        build_ric(ref, segs);
        auto nodes = all_nodes(t);
        for (int trial = 0; trial < 10; ++trial) {
            StabbedNode at = nodes[std::uniform_int_distribution<std::size_t>(0, nodes.size() - 1)(rng)];
            auto q = cut_point_inside(t.node(at.node).region, grid, rng);
            if (!q) continue;
            VisitStats st;
            auto [m, p] = v_partition(t, at.node, *q, st);
            NodeId back = v_merge(t, m, p, *q, st);
            t.hang_in(at, back);
            ASSERT_TRUE(structural_equal(t, ref)) << "seed " << seed;
            nodes = all_nodes(t);
            ++vertical;
        }
        std::uniform_int_distribution<int> c(1, grid);
        for (int trial = 0; trial < 10; ++trial) {
            Point a(c(rng), c(rng)), b(c(rng), c(rng));
            if (a == b) continue;
            Segment cut(1000, a, b);
            try {
                t.register_segment(cut, 1);
            } catch (const OverlapError&) {
                continue;
            }
            const SegmentEntry& entry = *t.entry(1000);
            for (const StabbedNode& at : all_nodes(t)) {
                if (!spans(cut, t.node(at.node).region)) continue;
                VisitStats st;
                auto [m, p] = partition(t, at.node, entry, st);
                NodeId back = merge(t, m, p, entry, st);
                t.hang_in(at, back);
                ++edge;
                break;
            }
            t.unregister_segment(1000);
            ASSERT_TRUE(structural_equal(t, ref)) << "seed " << seed;
        }
        EXPECT_TRUE(t.audit(false).empty());
    }
    EXPECT_GT(vertical, 300);
    EXPECT_GT(edge, 100);
}

TEST(Insert, AtMaximumRankMatchesLeafInsert) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        auto segs = grid_segments(rng, 15, 20);
        Tst a(grid_domain(15)), b(grid_domain(15));
        for (const Segment& s : segs) {
            VisitStats x = insert_at(a, s, a.segment_count() + 1);
            VisitStats y = b.leaf_insert(s);
            EXPECT_EQ(x.crossings, y.crossings);
        }
        EXPECT_TRUE(structural_equal(a, b));
    }
}

TEST(Insert, AtRankOneEqualsRicWithNewSegmentFirst) {
    Segment old(0, Point(1, 1), Point(4, 2)), fresh(1, Point(6, 6), Point(9, 8));
    Tst t(grid_domain(10));
    t.leaf_insert(old);
    insert_at(t, fresh, 1);
    Tst ref(grid_domain(10));
    build_ric(ref, {fresh, old});
    EXPECT_TRUE(structural_equal(t, ref));
    EXPECT_TRUE(t.audit().empty());
}

TEST(Insert, RandomRanksMatchRic) {
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        std::mt19937_64 rng(seed);
        int grid = seed % 3 == 0 ? 5 : (seed % 3 == 1 ? 12 : 1000);
        auto segs = grid_segments(rng, grid, 15);
        Tst t(grid_domain(grid), seed);
        std::vector<Segment> final_order;
        for (const Segment& s : segs) {
            std::size_t rank = std::uniform_int_distribution<std::size_t>(1, final_order.size() + 1)(rng);
            insert_at(t, s, rank);
            final_order.insert(final_order.begin() + static_cast<long>(rank - 1), s);
        }
        Tst ref(grid_domain(grid));
        build_ric(ref, final_order);
        ASSERT_TRUE(structural_equal(t, ref)) << "seed " << seed;
        auto issues = t.audit();
        ASSERT_TRUE(issues.empty()) << issues.front();
    }
}

TEST(Insert, VisitsBoundedByAffectedSubtrees) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        std::mt19937_64 rng(seed);
        auto segs = grid_segments(rng, 20, 30);
        Tst t(grid_domain(20), seed);
        for (const Segment& s : segs) {
            VisitStats st = insert(t, s, rng);
            EXPECT_LE(st.update_visits, 8 * st.affected_nodes);
        }
    }
}

TEST(Insert, RejectsBadInput) {
    Tst t(grid_domain(10));
    insert_at(t, Segment(0, Point(1, 1), Point(4, 4)), 1);
    EXPECT_THROW(insert_at(t, Segment(1, Point(2, 2), Point(5, 5)), 1), OverlapError);
    EXPECT_THROW(insert_at(t, Segment(2, Point(2, 2), Point(12, 5)), 1), OutOfDomainError);
    EXPECT_THROW(insert_at(t, Segment(3, Point(2, 3), Point(5, 5)), 5), RankOutOfRange);
    EXPECT_EQ(t.segment_count(), 1u);
    EXPECT_TRUE(t.audit().empty());
}

TEST(Erase, UndoesInsertWithEqualVisits) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        std::mt19937_64 rng(seed);
        int grid = seed % 2 ? 7 : 200;
        auto segs = grid_segments(rng, grid, 14);
        Tst t(grid_domain(grid), seed), ref(grid_domain(grid), seed);
        std::vector<Segment> order;
        for (std::size_t i = 0; i + 1 < segs.size(); ++i) {
            std::size_t rank = std::uniform_int_distribution<std::size_t>(1, order.size() + 1)(rng);
            insert_at(t, segs[i], rank);
            order.insert(order.begin() + static_cast<long>(rank - 1), segs[i]);
        }
        build_ric(ref, order);
        std::size_t rank = std::uniform_int_distribution<std::size_t>(1, order.size() + 1)(rng);
        VisitStats in = insert_at(t, segs.back(), rank);
        VisitStats out = erase(t, segs.back().id());
        EXPECT_EQ(in.search_visits, out.search_visits) << "seed " << seed;
        EXPECT_EQ(in.update_visits, out.update_visits) << "seed " << seed;
        ASSERT_TRUE(structural_equal(t, ref)) << "seed " << seed;
    }
}

TEST(Erase, RandomDeletionsMatchRicOfRemainder) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        auto segs = grid_segments(rng, seed % 2 ? 6 : 50, 12);
        Tst t(grid_domain(50), seed);
        for (const Segment& s : segs) insert(t, s, rng);
        while (t.segment_count() > 0) {
            auto live = t.entries_by_priority();
            std::size_t k = std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng);
            std::vector<Segment> rest;
            for (std::size_t i = 0; i < live.size(); ++i)
                if (i != k) rest.push_back(live[i]->segment);
            erase(t, live[k]->segment.id());
            Tst ref(grid_domain(50));
            build_ric(ref, rest);
            ASSERT_TRUE(structural_equal(t, ref)) << "seed " << seed;
        }
        EXPECT_EQ(t.size(), 1u);
        EXPECT_TRUE(t.order().audit().empty());
    }
}

TEST(Erase, MaximumTouchesOnlyItsChains) {
    std::mt19937_64 rng(4);
    auto segs = grid_segments(rng, 20, 15);
    Tst t(grid_domain(20));
    build_ric(t, segs);
    std::size_t before = t.size();
    VisitStats st = erase(t, segs.back().id());
    Tst ref(grid_domain(20));
    build_ric(ref, std::vector<Segment>(segs.begin(), segs.end() - 1));
    EXPECT_TRUE(structural_equal(t, ref));
    EXPECT_GE(st.update_visits, 1u);
    EXPECT_LT(t.size(), before);
}

TEST(Erase, UnknownSegment) {
    Tst t(grid_domain(10));
    EXPECT_THROW(erase(t, 7), UnknownSegment);
}
