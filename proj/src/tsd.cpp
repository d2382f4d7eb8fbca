#include "dyntrap/tsd.h"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "dyntrap/decomposition.h"

namespace dyntrap {

namespace {

struct LexLess {
    bool operator()(const Point* a, const Point* b) const { return cmp_sheared(*a, *b) < 0; }
};

bool through(const Segment* e, const Point& p) { return e && orient(e->left(), e->right(), p) == 0; }

// A wall that shrinks to the single point p.
bool pinched(const Trapezoid& t, const Point& p) { return through(t.top, p) && through(t.bottom, p); }

using FaceKey = std::tuple<std::string, std::string, SegId, SegId>;

FaceKey face_key(const Trapezoid& t) {
    return {t.left ? t.left->str() : "-", t.right ? t.right->str() : "+", t.top ? t.top->id() : -1,
            t.bottom ? t.bottom->id() : -1};
}

}  // namespace

void LeafLinks::add(NodeId id) {
    if (contains(id)) return;
    for (NodeId& slot : ids)
        if (slot == kNoNode) {
            slot = id;
            return;
        }
    throw GeometryError("leaf has more than two neighbors across one wall");
}

void LeafLinks::remove(NodeId id) {
    for (NodeId& slot : ids)
        if (slot == id) slot = kNoNode;
}

Tsd::Tsd(const Domain& domain, std::uint64_t order_seed) : domain_(domain), order_(order_seed) {
    root_ = alloc(Trapezoid{});
}

NodeId Tsd::alloc(const Trapezoid& region) {
    NodeId id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = TsdNode{};
    } else {
        id = static_cast<NodeId>(nodes_.size());
        nodes_.emplace_back();
    }
    nodes_[id].region = region;
    return id;
}

void Tsd::release(NodeId id) {
    nodes_[id] = TsdNode{};
    free_.push_back(id);
}

std::vector<const Segment*> Tsd::segments() const {
    std::vector<const Segment*> out;
    for (const auto& [id, e] : registry_) out.push_back(&e->segment);
    std::sort(out.begin(), out.end(), [](const Segment* a, const Segment* b) { return a->id() < b->id(); });
    return out;
}

NodeId Tsd::locate_counted(const Point& p, const Segment* hint, std::uint64_t& visits) const {
    NodeId v = root_;
    ++visits;
    while (nodes_[v].kind != NodeKind::Leaf) {
        const TsdNode& n = nodes_[v];
        Side side = n.kind == NodeKind::Vertical ? side_of_vertical(*n.point, p, hint)
                                                 : side_of_edge(n.owner->segment, p, hint);
        v = side == Side::Minus ? n.minus : n.plus;
        ++visits;
    }
    return v;
}

// Leaf entered by s just after it crosses the wall through p.
NodeId Tsd::locate_past_wall(const Point& p, const Segment& s, std::uint64_t& visits) const {
    if (s.left().x() == s.right().x() || orient(s.left(), s.right(), p) == 0) return locate_counted(p, &s, visits);
    Point q(p.x(), s.left().y() + (p.x() - s.left().x()) * (s.right().y() - s.left().y()) /
                                      (s.right().x() - s.left().x()));
    NodeId v = root_;
    ++visits;
    while (nodes_[v].kind != NodeKind::Leaf) {
        const TsdNode& n = nodes_[v];
        Side side = n.kind == NodeKind::Vertical ? (cmp_sheared(*n.point, p) <= 0 ? Side::Plus : Side::Minus)
                                                 : side_of_edge(n.owner->segment, q, &s);
        v = side == Side::Minus ? n.minus : n.plus;
        ++visits;
    }
    return v;
}

NodeId Tsd::locate(const Point& p, const Segment* hint) {
    if (!domain_.contains_strictly(p)) throw OutOfDomainError("point " + p.str() + " outside the domain");
    return locate_counted(p, hint, stats_.search_visits);
}

bool Tsd::adjacent(NodeId left, NodeId right) const {
    const Trapezoid& x = nodes_[left].region;
    const Trapezoid& y = nodes_[right].region;
    if (!x.right || !y.left || !(*x.right == *y.left)) return false;
    if (!same_segment(x.top, y.top) && !same_segment(x.bottom, y.bottom)) return false;
    return !pinched(x, *x.right) && !pinched(y, *y.left);
}

void Tsd::relink(const std::vector<NodeId>& old_leaves, const std::set<NodeId>& neighbors,
                 const std::vector<NodeId>& fresh) {
    std::set<NodeId> pool_set = neighbors;
    for (NodeId z : pool_set) {
        for (NodeId u : old_leaves) {
            nodes_[z].left.remove(u);
            nodes_[z].right.remove(u);
        }
    }
    std::set<NodeId> fresh_set(fresh.begin(), fresh.end());
    pool_set.insert(fresh.begin(), fresh.end());

    std::map<const Point*, std::vector<NodeId>, LexLess> by_left;
    std::map<const Point*, std::vector<NodeId>, LexLess> by_right;
    for (NodeId y : pool_set) {
        if (nodes_[y].region.left) by_left[nodes_[y].region.left.get()].push_back(y);
        if (nodes_[y].region.right) by_right[nodes_[y].region.right.get()].push_back(y);
    }
    for (NodeId x : fresh) {
        nodes_[x].left.clear();
        nodes_[x].right.clear();
    }
    for (NodeId x : fresh) {
        const Trapezoid& r = nodes_[x].region;
        if (r.right) {
            auto it = by_left.find(r.right.get());
            if (it != by_left.end())
                for (NodeId y : it->second)
                    if (y != x && adjacent(x, y)) {
                        nodes_[x].right.add(y);
                        nodes_[y].left.add(x);
                    }
        }
        if (r.left) {
            auto it = by_right.find(r.left.get());
            if (it != by_right.end())
                for (NodeId y : it->second)
                    if (y != x && !fresh_set.count(y) && adjacent(y, x)) {
                        nodes_[x].left.add(y);
                        nodes_[y].right.add(x);
                    }
        }
    }
}

VisitStats Tsd::leaf_insert(const Segment& s_in, std::size_t rank) {
    if (rank != 0 && rank != order_.size() + 1)
        throw NotMaxPriority("leaf insertion at rank " + std::to_string(rank) + " below the maximum");
    if (!domain_.contains_strictly(s_in)) throw OutOfDomainError("segment " + s_in.str() + " leaves the domain");
    if (registry_.count(s_in.id())) throw std::invalid_argument("duplicate segment id " + std::to_string(s_in.id()));
    overlaps_.check(s_in);
    auto owned = std::make_unique<SegmentEntry>(SegmentEntry{s_in, order_.emplace_at(order_.size() + 1)});
    const SegmentEntry* e = owned.get();
    registry_.emplace(s_in.id(), std::move(owned));
    overlaps_.add(s_in);
    const Segment& s = e->segment;

    VisitStats st;
    std::vector<NodeId> stabbed;
    std::vector<bool> via_wall;
    NodeId cur = locate_counted(s.left(), &s, st.search_visits);
    while (true) {
        stabbed.push_back(cur);
        const Trapezoid& r = nodes_[cur].region;
        auto piece = clip(s, r);
        if (!piece) throw GeometryError("segment walk of " + s.str() + " left the segment at " + r.str() + " after " + (stabbed.size() > 1 ? nodes_[stabbed[stabbed.size() - 2]].region.str() : std::string("start")));
        if (piece->cut_right) {
            if (*piece->cut_right == s.right()) break;
            cur = locate_counted(*piece->cut_right, &s, st.search_visits);
            via_wall.push_back(false);
            continue;
        }
        NodeId next = kNoNode;
        for (NodeId y : nodes_[cur].right.ids) {
            if (y == kNoNode) continue;
            ++st.search_visits;
            auto entry = clip(s, nodes_[y].region);
            if (entry && !entry->cut_left) {
                next = y;
                break;
            }
        }
        if (next == kNoNode) {
            if (cmp_sheared(s.right(), *r.right) <= 0) break;
            next = locate_past_wall(*r.right, s, st.search_visits);
        }
        via_wall.push_back(true);
        cur = next;
    }

    InsertRecord rec{s.id(), stabbed, {}, {}};
    std::set<NodeId> neighbors;
    for (NodeId u : stabbed) {
        rec.saved_links.push_back({u, {nodes_[u].left, nodes_[u].right}});
        for (const LeafLinks* links : {&nodes_[u].left, &nodes_[u].right})
            for (NodeId y : links->ids)
                if (y != kNoNode) neighbors.insert(y);
    }
    for (NodeId u : stabbed) neighbors.erase(u);
    for (NodeId y : neighbors) rec.saved_links.push_back({y, {nodes_[y].left, nodes_[y].right}});

    std::set<SegId> crossed;
    std::vector<NodeId> above(stabbed.size()), below(stabbed.size()), edge(stabbed.size());
    std::vector<NodeId> fresh;
    for (std::size_t i = 0; i < stabbed.size(); ++i) {
        NodeId u = stabbed[i];
        Trapezoid r = nodes_[u].region;
        for (const Segment* side : {r.top, r.bottom})
            if (side && crossing_point(s, *side)) crossed.insert(side->id());
        auto piece = clip(s, r);
        const PointRef& p1 = piece->cut_left;
        const PointRef& p2 = piece->cut_right;
        Trapezoid mid{p1 ? p1 : r.left, p2 ? p2 : r.right, r.top, r.bottom};
        NodeId a = alloc(above_of(mid, &s));
        NodeId b = alloc(below_of(mid, &s));
        above[i] = a;
        below[i] = b;
        fresh.push_back(a);
        fresh.push_back(b);
        NodeId head;
        if (!p1 && !p2) {
            head = u;
        } else {
            head = alloc(mid);
            rec.created.push_back(head);
        }
        edge[i] = head;
        nodes_[head].kind = NodeKind::Edge;
        nodes_[head].owner = e;
        nodes_[head].minus = b;
        nodes_[head].plus = a;
        nodes_[a].parents = nodes_[b].parents = 1;
        if (head != u) nodes_[head].parents = 1;
        if (p2) {
            NodeId rr = alloc(right_of(r, p2));
            fresh.push_back(rr);
            nodes_[rr].parents = 1;
            NodeId v = p1 ? alloc(Trapezoid{p1, r.right, r.top, r.bottom}) : u;
            if (v != u) rec.created.push_back(v);
            nodes_[v].kind = NodeKind::Vertical;
            nodes_[v].owner = e;
            nodes_[v].point = p2;
            nodes_[v].minus = head;
            nodes_[v].plus = rr;
            if (v != u) nodes_[v].parents = 1;
            head = v;
        }
        if (p1) {
            NodeId ll = alloc(left_of(r, p1));
            fresh.push_back(ll);
            nodes_[ll].parents = 1;
            nodes_[u].kind = NodeKind::Vertical;
            nodes_[u].owner = e;
            nodes_[u].point = p1;
            nodes_[u].minus = ll;
            nodes_[u].plus = head;
        }
        nodes_[u].left.clear();
        nodes_[u].right.clear();
        st.update_visits += 1 + (p1 ? 1 : 0) + (p2 ? 1 : 0);
        ++st.affected_nodes;
    }

    std::set<NodeId> merged_away;
    for (std::size_t i = 0; i + 1 < stabbed.size(); ++i) {
        if (!via_wall[i]) continue;
        const PointRef& wall = nodes_[above[i]].region.right;
        if (!wall || !(*wall == *nodes_[above[i + 1]].region.left)) continue;
        const Point& p = *wall;
        int o = orient(s.left(), s.right(), p);
        bool merge_above = o < 0;
        bool merge_below = o > 0;
        if (o == 0) {
            bool emit_above = false, emit_below = false, crossing = false;
            for (const auto& [id, other] : registry_) {
                const Segment& t = other->segment;
                if (id == s.id()) continue;
                if (t.left() == p || t.right() == p) {
                    const Point& far = t.left() == p ? t.right() : t.left();
                    (orient(s.left(), s.right(), far) > 0 ? emit_above : emit_below) = true;
                } else if (orient(t.left(), t.right(), p) == 0 && cmp_sheared(t.left(), p) < 0 &&
                           cmp_sheared(p, t.right()) < 0) {
                    crossing = true;
                }
            }
            merge_above = !crossing && !emit_above;
            merge_below = !crossing && !emit_below;
        }
        auto fuse = [&](std::vector<NodeId>& side, bool plus_side) {
            NodeId x = side[i];
            NodeId y = side[i + 1];
            Trapezoid& rx = nodes_[x].region;
            const Trapezoid& ry = nodes_[y].region;
            if (!same_segment(rx.top, ry.top) || !same_segment(rx.bottom, ry.bottom))
                throw GeometryError("blocked wall between differently bounded pieces at " + p.str());
            rx.right = ry.right;
            NodeId parent = edge[i + 1];
            (plus_side ? nodes_[parent].plus : nodes_[parent].minus) = x;
            ++nodes_[x].parents;
            release(y);
            merged_away.insert(y);
            side[i + 1] = x;
            ++st.update_visits;
        };
        if (merge_above) fuse(above, true);
        if (merge_below) fuse(below, false);
    }
    std::vector<NodeId> survivors;
    for (NodeId f : fresh)
        if (!merged_away.count(f)) survivors.push_back(f);
    rec.created.insert(rec.created.end(), survivors.begin(), survivors.end());
    relink(stabbed, neighbors, survivors);
    history_.push_back(std::move(rec));

    st.crossings = crossed.size();
    stats_ += st;
    return st;
}

SegId Tsd::decremental_delete_max() {
    if (history_.empty()) throw EmptyStructure("no segment to remove");
    InsertRecord rec = std::move(history_.back());
    history_.pop_back();
    for (NodeId c : rec.created) release(c);
    for (NodeId h : rec.heads) {
        TsdNode& n = nodes_[h];
        n.kind = NodeKind::Leaf;
        n.owner = nullptr;
        n.point.reset();
        n.minus = n.plus = kNoNode;
    }
    for (const auto& [id, links] : rec.saved_links) {
        nodes_[id].left = links.first;
        nodes_[id].right = links.second;
    }
    auto it = registry_.find(rec.id);
    order_.drop(it->second->order);
    overlaps_.remove(it->second->segment);
    registry_.erase(it);
    return rec.id;
}

std::vector<NodeId> Tsd::leaves() const {
    std::vector<NodeId> out;
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root_};
    seen[root_] = true;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        const TsdNode& n = nodes_[v];
        if (n.kind == NodeKind::Leaf) {
            out.push_back(v);
            continue;
        }
        for (NodeId c : {n.plus, n.minus})
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
    }
    return out;
}

TreeShape Tsd::shape() const {
    // Longest root path per node, over a topological order.
    std::vector<std::size_t> depth(nodes_.size(), 0);
    std::vector<std::uint32_t> pending(nodes_.size(), 0);
    std::vector<NodeId> order;
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<NodeId> stack{root_};
    seen[root_] = true;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        order.push_back(v);
        const TsdNode& n = nodes_[v];
        if (n.kind == NodeKind::Leaf) continue;
        for (NodeId c : {n.minus, n.plus}) {
            ++pending[c];
            if (!seen[c]) {
                seen[c] = true;
                stack.push_back(c);
            }
        }
    }
    TreeShape out;
    out.size = order.size();
    std::vector<NodeId> ready{root_};
    std::size_t depth_sum = 0;
    while (!ready.empty()) {
        NodeId v = ready.back();
        ready.pop_back();
        const TsdNode& n = nodes_[v];
        if (n.kind == NodeKind::Leaf) {
            ++out.leaves;
            depth_sum += depth[v];
            out.max_depth = std::max(out.max_depth, depth[v]);
            continue;
        }
        for (NodeId c : {n.minus, n.plus}) {
            depth[c] = std::max(depth[c], depth[v] + 1);
            if (--pending[c] == 0) ready.push_back(c);
        }
    }
    out.mean_leaf_depth = out.leaves ? static_cast<double>(depth_sum) / static_cast<double>(out.leaves) : 0.0;
    return out;
}

std::vector<std::string> Tsd::audit() const {
    std::vector<std::string> issues;
    auto report = [&](NodeId v, const std::string& what) {
        if (issues.size() < 50) issues.push_back("node " + std::to_string(v) + " " + nodes_[v].region.str() + ": " + what);
    };

    // Acyclicity and parent counts.
    std::vector<int> color(nodes_.size(), 0);
    std::vector<std::uint32_t> parents(nodes_.size(), 0);
    std::vector<std::pair<NodeId, int>> stack{{root_, 0}};
    color[root_] = 1;
    while (!stack.empty()) {
        auto& [v, step] = stack.back();
        const TsdNode& n = nodes_[v];
        if (n.kind == NodeKind::Leaf || step == 2) {
            color[v] = 2;
            stack.pop_back();
            continue;
        }
        NodeId c = step == 0 ? n.minus : n.plus;
        ++step;
        if (c == kNoNode) {
            report(v, "missing child");
            continue;
        }
        ++parents[c];
        if (color[c] == 1) {
            report(c, "cycle through node");
        } else if (color[c] == 0) {
            color[c] = 1;
            stack.push_back({c, 0});
        }
    }
    if (!issues.empty()) return issues;

    std::vector<NodeId> leaf_ids;
    for (NodeId v = 0; v < nodes_.size(); ++v) {
        if (color[v] != 2) continue;
        const TsdNode& n = nodes_[v];
        if (v != root_ && parents[v] != n.parents) report(v, "parent count mismatch");
        if (!trapezoid_valid(n.region)) report(v, "invalid region");
        if (n.kind == NodeKind::Leaf) {
            leaf_ids.push_back(v);
            continue;
        }
        const TsdNode& m = nodes_[n.minus];
        const TsdNode& p = nodes_[n.plus];
        if (n.kind == NodeKind::Vertical) {
            if (!same_region(m.region, left_of(n.region, n.point))) report(v, "minus region mismatch");
            if (!same_region(p.region, right_of(n.region, n.point))) report(v, "plus region mismatch");
        } else {
            const Segment* t = &n.owner->segment;
            if (!spans(*t, n.region)) report(v, "edge cut does not span the region");
            for (const TsdNode* c : {&m, &p}) {
                bool lower = c == &m;
                if (!same_segment(lower ? c->region.top : c->region.bottom, t) ||
                    !same_segment(lower ? c->region.bottom : c->region.top, lower ? n.region.bottom : n.region.top))
                    report(v, "edge child crosses the parent's top or bottom");
                if (cmp_left_bound(c->region.left, n.region.left) > 0 || cmp_right_bound(c->region.right, n.region.right) < 0)
                    report(v, "edge child narrower than its parent");
            }
        }
    }

    std::vector<FaceKey> have;
    for (NodeId v : leaf_ids) have.push_back(face_key(nodes_[v].region));
    std::vector<FaceKey> want;
    for (const Trapezoid& f : decompose(segments())) want.push_back(face_key(f));
    std::sort(have.begin(), have.end());
    std::sort(want.begin(), want.end());
    if (have != want)
        issues.push_back("leaves differ from the decomposition: " + std::to_string(have.size()) + " leaves vs " +
                         std::to_string(want.size()) + " faces");

    std::map<const Point*, std::vector<NodeId>, LexLess> by_left;
    for (NodeId v : leaf_ids)
        if (nodes_[v].region.left) by_left[nodes_[v].region.left.get()].push_back(v);
    for (NodeId x : leaf_ids) {
        const TsdNode& n = nodes_[x];
        LeafLinks expect;
        if (n.region.right) {
            auto it = by_left.find(n.region.right.get());
            if (it != by_left.end())
                for (NodeId y : it->second)
                    if (adjacent(x, y)) expect.add(y);
        }
        for (NodeId y : n.right.ids) {
            if (y == kNoNode) continue;
            if (color[y] != 2 || nodes_[y].kind != NodeKind::Leaf) report(x, "link to a non-leaf");
            else if (!nodes_[y].left.contains(x)) report(x, "asymmetric neighbor link");
        }
        for (NodeId y : n.left.ids)
            if (y != kNoNode && (color[y] != 2 || !nodes_[y].right.contains(x))) report(x, "asymmetric neighbor link");
        for (NodeId y : expect.ids)
            if (y != kNoNode && !n.right.contains(y)) report(x, "missing right neighbor " + std::to_string(y));
        if (n.right.count() != expect.count()) report(x, "extra right neighbor");
    }
    return issues;
}

bool structural_equal(const Tsd& a, const Tsd& b) {
    std::unordered_map<NodeId, NodeId> forward;
    std::unordered_map<NodeId, NodeId> backward;
    std::vector<std::pair<NodeId, NodeId>> stack{{a.root(), b.root()}};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        auto f = forward.find(x);
        auto g = backward.find(y);
        if (f != forward.end() || g != backward.end()) {
            if (f == forward.end() || g == backward.end() || f->second != y || g->second != x) return false;
            continue;
        }
        forward[x] = y;
        backward[y] = x;
        const TsdNode& m = a.node(x);
        const TsdNode& n = b.node(y);
        if (m.kind != n.kind) return false;
        if (m.kind == NodeKind::Leaf) {
            if (!same_region(m.region, n.region)) return false;
            continue;
        }
        if (m.owner->segment.id() != n.owner->segment.id()) return false;
        if (m.kind == NodeKind::Vertical && !(*m.point == *n.point)) return false;
        stack.push_back({m.minus, n.minus});
        stack.push_back({m.plus, n.plus});
    }
    return true;
}

}  // namespace dyntrap
