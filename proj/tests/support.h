#pragma once

#include <random>
#include <set>
#include <vector>

#include "dyntrap/geometry.h"

namespace dyntrap::testing {

inline Domain grid_domain(int grid) { return Domain{Rational(0), Rational(0), Rational(grid + 1), Rational(grid + 1)}; }

/// Segments with integer endpoints in [1, grid]^2. Small grids give many
/// shared endpoints, shared x-coordinates and crossings; overlaps are redrawn.
inline std::vector<Segment> grid_segments(std::mt19937_64& rng, int grid, int n) {
    std::uniform_int_distribution<int> c(1, grid);
    std::vector<Segment> out;
    OverlapIndex index;
    while (static_cast<int>(out.size()) < n) {
        Point a(c(rng), c(rng)), b(c(rng), c(rng));
        if (a == b) continue;
        Segment s(static_cast<SegId>(out.size()), a, b);
        try {
            index.check(s);
        } catch (const OverlapError&) {
            continue;
        }
        index.add(s);
        out.push_back(s);
    }
    return out;
}

/// Horizontal segments on distinct rows of [1, grid]^2.
inline std::vector<Segment> horizontal_segments(std::mt19937_64& rng, int grid, int n) {
    std::uniform_int_distribution<int> c(1, grid);
    std::vector<Segment> out;
    OverlapIndex index;
    while (static_cast<int>(out.size()) < n) {
        int y = c(rng), x1 = c(rng), x2 = c(rng);
        if (x1 == x2) continue;
        Segment s(static_cast<SegId>(out.size()), Point(x1, y), Point(x2, y));
        try {
            index.check(s);
        } catch (const OverlapError&) {
            continue;
        }
        index.add(s);
        out.push_back(s);
    }
    return out;
}

inline bool proper_cross(const Segment& a, const Segment& b) {
    return orient(a.left(), a.right(), b.left()) * orient(a.left(), a.right(), b.right()) < 0 &&
           orient(b.left(), b.right(), a.left()) * orient(b.left(), b.right(), a.right()) < 0;
}

inline bool touch(const Segment& a, const Segment& b) {
    auto on = [](const Segment& s, const Point& p) {
        return orient(s.left(), s.right(), p) == 0 && cmp_sheared(s.left(), p) <= 0 && cmp_sheared(p, s.right()) <= 0;
    };
    return on(a, b.left()) || on(a, b.right()) || on(b, a.left()) || on(b, a.right());
}

/// Pairwise disjoint segments with all endpoint x-coordinates distinct.
/// With `crossings` the segments may cross, but no three share a point.
inline std::vector<Segment> general_position_segments(std::mt19937_64& rng, int n, bool crossings, int grid = 1 << 20) {
    std::uniform_int_distribution<int> c(1, grid);
    std::vector<Segment> out;
    std::set<int> xs;
    while (static_cast<int>(out.size()) < n) {
        int x1 = c(rng), x2 = c(rng);
        if (x1 == x2 || xs.count(x1) || xs.count(x2)) continue;
        Segment s(static_cast<SegId>(out.size()), Point(x1, c(rng)), Point(x2, c(rng)));
        bool ok = true;
        std::vector<Point> new_crossings;
        for (const Segment& t : out) {
            if (touch(s, t)) ok = false;
            if (!ok) break;
            if (proper_cross(s, t)) {
                if (!crossings) ok = false;
                else if (auto x = crossing_point(s, t)) new_crossings.push_back(*x);
            }
        }
        // a new crossing must not land on an existing crossing's x or an endpoint x
        for (std::size_t i = 0; ok && i < new_crossings.size(); ++i) {
            if (new_crossings[i].x() == x1 || new_crossings[i].x() == x2) ok = false;
            for (const Segment& t : out)
                if (new_crossings[i].x() == t.left().x() || new_crossings[i].x() == t.right().x()) ok = false;
            for (std::size_t j = 0; j < i; ++j)
                if (new_crossings[i].x() == new_crossings[j].x()) ok = false;
        }
        if (!ok) continue;
        xs.insert(x1);
        xs.insert(x2);
        out.push_back(s);
    }
    return out;
}

inline std::vector<const Segment*> pointers(const std::vector<Segment>& segments) {
    std::vector<const Segment*> out;
    for (const Segment& s : segments) out.push_back(&s);
    return out;
}

}  // namespace dyntrap::testing
