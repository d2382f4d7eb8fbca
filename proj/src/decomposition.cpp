#include "dyntrap/decomposition.h"

#include <algorithm>
#include <map>
#include <utility>

namespace dyntrap {

namespace {

using SegList = std::vector<const Segment*>;

struct Gap {
    const Segment* bottom;
    const Segment* top;
};

Gap gap_at(const SegList& list, std::size_t j) {
    return {j == 0 ? nullptr : list[j - 1], j == list.size() ? nullptr : list[j]};
}

bool contains_point(const Segment& s, const Point& p) { return orient(s.left(), s.right(), p) == 0; }

// Gaps of a slab list touched by the wall that the vertex p emits.
std::vector<bool> walled_gaps(const SegList& list, const Point& p, const Segment* through, bool emit_above,
                              bool emit_below) {
    std::vector<bool> hit(list.size() + 1, false);
    std::size_t lo = list.size();
    std::size_t hi = 0;
    std::size_t below = 0;
    std::size_t on_line = list.size();
    for (std::size_t j = 0; j < list.size(); ++j) {
        const Segment& s = *list[j];
        int o = orient(s.left(), s.right(), p);
        if (o == 0) {
            lo = std::min(lo, j);
            hi = j;
            if (&s == through) on_line = j;
        } else if (o > 0) {
            ++below;
        }
    }
    if (lo > hi) {
        hit[below] = true;
        return hit;
    }
    if (!through) {
        for (std::size_t j = lo; j <= hi + 1; ++j) hit[j] = true;
        return hit;
    }
    if (emit_above)
        for (std::size_t j = on_line + 1; j <= hi + 1; ++j) hit[j] = true;
    if (emit_below)
        for (std::size_t j = lo; j <= on_line; ++j) hit[j] = true;
    return hit;
}

}  // namespace

std::size_t count_crossings(const std::vector<const Segment*>& segments) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < segments.size(); ++i)
        for (std::size_t j = i + 1; j < segments.size(); ++j)
            if (crossing_point(*segments[i], *segments[j])) ++k;
    return k;
}

std::vector<Trapezoid> decompose(const std::vector<const Segment*>& segments) {
    std::vector<PointRef> vertices;
    for (const Segment* s : segments) {
        vertices.push_back(s->left_ref());
        vertices.push_back(s->right_ref());
    }
    for (std::size_t i = 0; i < segments.size(); ++i)
        for (std::size_t j = i + 1; j < segments.size(); ++j)
            if (auto x = crossing_point(*segments[i], *segments[j]))
                vertices.push_back(std::make_shared<const Point>(*x));
    std::sort(vertices.begin(), vertices.end(),
              [](const PointRef& a, const PointRef& b) { return cmp_sheared(*a, *b) < 0; });
    vertices.erase(std::unique(vertices.begin(), vertices.end(),
                               [](const PointRef& a, const PointRef& b) { return *a == *b; }),
                   vertices.end());

    std::vector<Trapezoid> faces;
    SegList left_list;
    std::vector<PointRef> left_open{nullptr};
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const PointRef& p = vertices[i];
        SegList right_list;
        if (i + 1 < vertices.size()) {
            const Point& a = *p;
            const Point& b = *vertices[i + 1];
            for (const Segment* s : segments)
                if (cmp_sheared(s->left(), a) <= 0 && cmp_sheared(s->right(), b) >= 0) right_list.push_back(s);
            std::sort(right_list.begin(), right_list.end(), [&](const Segment* x, const Segment* y) {
                return x != y && above_in_slab(*x, *y, a, b);
            });
        }

        const Segment* through = nullptr;
        int through_count = 0;
        for (const Segment* s : left_list) {
            if (!(s->right() == *p) && contains_point(*s, *p)) {
                through = s;
                ++through_count;
            }
        }
        if (through_count != 1) through = nullptr;
        bool emit_above = false;
        bool emit_below = false;
        if (through) {
            for (const Segment* s : segments) {
                if (s->left() == *p || s->right() == *p) {
                    const Point& other = s->left() == *p ? s->right() : s->left();
                    int o = orient(through->left(), through->right(), other);
                    (o > 0 ? emit_above : emit_below) = true;
                }
            }
        }

        auto closed = walled_gaps(left_list, *p, through, emit_above, emit_below);
        auto opened = walled_gaps(right_list, *p, through, emit_above, emit_below);

        std::map<std::pair<const Segment*, const Segment*>, PointRef> carried;
        for (std::size_t j = 0; j <= left_list.size(); ++j) {
            Gap g = gap_at(left_list, j);
            if (closed[j]) {
                faces.push_back(Trapezoid{left_open[j], p, g.top, g.bottom});
            } else {
                carried[{g.bottom, g.top}] = left_open[j];
            }
        }
        std::vector<PointRef> right_open(right_list.size() + 1);
        for (std::size_t j = 0; j <= right_list.size(); ++j) {
            if (opened[j]) {
                right_open[j] = p;
                continue;
            }
            Gap g = gap_at(right_list, j);
            auto it = carried.find({g.bottom, g.top});
            if (it == carried.end()) throw GeometryError("decomposition sweep lost a gap at " + p->str());
            right_open[j] = it->second;
            carried.erase(it);
        }
        if (!carried.empty()) throw GeometryError("decomposition sweep dropped a gap at " + p->str());
        left_list = std::move(right_list);
        left_open = std::move(right_open);
    }
    faces.push_back(Trapezoid{left_open[0], nullptr, nullptr, nullptr});
    return faces;
}

int enclosing_face(const std::vector<Trapezoid>& faces, const Trapezoid& region) {
    int found = -1;
    for (std::size_t i = 0; i < faces.size(); ++i) {
        const Trapezoid& f = faces[i];
        if (!same_segment(f.top, region.top) || !same_segment(f.bottom, region.bottom)) continue;
        if (cmp_left_bound(f.left, region.left) > 0) continue;
        if (cmp_right_bound(f.right, region.right) < 0) continue;
        if (found >= 0) return -1;
        found = static_cast<int>(i);
    }
    return found;
}

}  // namespace dyntrap
