#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <gmpxx.h>

namespace dyntrap {

using Rational = mpq_class;
using SegId = std::int64_t;

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two segments share more than one point.
class OverlapError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

class OutOfDomainError : public GeometryError {
public:
    using GeometryError::GeometryError;
};

/// Exact rational point. Integer coordinates of moderate size are mirrored
/// into machine words so the common predicates avoid GMP entirely.
class Point {
public:
    Point() : Point(Rational(0), Rational(0)) {}
    Point(Rational x, Rational y);
    Point(std::int64_t x, std::int64_t y) : Point(Rational(x), Rational(y)) {}

    const Rational& x() const { return x_; }
    const Rational& y() const { return y_; }

    bool small() const { return small_; }
    std::int64_t ix() const { return ix_; }
    std::int64_t iy() const { return iy_; }

    std::string str() const;

    friend bool operator==(const Point& a, const Point& b);

private:
    Rational x_;
    Rational y_;
    std::int64_t ix_ = 0;
    std::int64_t iy_ = 0;
    bool small_ = false;
};

using PointRef = std::shared_ptr<const Point>;

inline PointRef make_point(Rational x, Rational y) {
    return std::make_shared<const Point>(std::move(x), std::move(y));
}

/// Lexicographic (x, y) order: the point order after the implicit
/// infinitesimal shear.
std::strong_ordering cmp_sheared(const Point& a, const Point& b);

/// Sign of the cross product (b - a) x (c - a): +1 left turn, -1 right turn.
int orient(const Point& a, const Point& b, const Point& c);

/// Exact value of (b - a) x (c - a).
Rational orient_value(const Point& a, const Point& b, const Point& c);

/// A closed segment with endpoints ordered left < right in sheared order.
class Segment {
public:
    Segment(SegId id, Point a, Point b);
    Segment(SegId id, PointRef a, PointRef b);

    SegId id() const { return id_; }
    const Point& left() const { return *left_; }
    const Point& right() const { return *right_; }
    const PointRef& left_ref() const { return left_; }
    const PointRef& right_ref() const { return right_; }

    bool has_endpoint(const Point& p) const { return left() == p || right() == p; }
    std::string str() const;

private:
    PointRef left_;
    PointRef right_;
    SegId id_;
};

enum class Side : std::uint8_t { Minus, Plus, On };

const char* to_string(Side s);

/// Side of p against the supporting line of e; Minus is below. When p is on
/// the line, the hint segment (which must contain p) decides by the side it
/// occupies next to p.
Side side_of_edge(const Segment& e, const Point& p, const Segment* hint = nullptr);

/// Side of p against the vertical cut through q; Minus is the lower sheared
/// half. p == q resolves to Plus unless the hint ends at p.
Side side_of_vertical(const Point& q, const Point& p, const Segment* hint = nullptr);

/// Interior crossing point of two segments, absent for disjoint or meeting
/// segments. Throws OverlapError when they share more than one point.
std::optional<Point> crossing_point(const Segment& s1, const Segment& s2);

/// Intersection of segment s with the supporting line of e. Requires the
/// endpoints of s to lie strictly on opposite sides of that line.
Point line_crossing(const Segment& s, const Segment& e);

bool overlapping(const Segment& a, const Segment& b);

/// Axis-aligned bounding rectangle of the whole subdivision.
struct Domain {
    Rational xmin;
    Rational ymin;
    Rational xmax;
    Rational ymax;

    bool contains_strictly(const Point& p) const;
    bool contains_strictly(const Segment& s) const;
};

/// A face of a trapezoidal subdivision in sheared coordinates. Null
/// boundaries stand for the domain rectangle.
struct Trapezoid {
    PointRef left;
    PointRef right;
    const Segment* top = nullptr;
    const Segment* bottom = nullptr;

    std::string str() const;
};

bool same_region(const Trapezoid& a, const Trapezoid& b);
bool same_point(const PointRef& a, const PointRef& b);
bool same_segment(const Segment* a, const Segment* b);

/// Lexicographic comparison where a null left bound is -inf and a null right
/// bound is +inf.
std::strong_ordering cmp_left_bound(const PointRef& a, const PointRef& b);
std::strong_ordering cmp_right_bound(const PointRef& a, const PointRef& b);

/// Well-formedness: left < right and bottom strictly below top.
bool trapezoid_valid(const Trapezoid& t);

bool trapezoid_contains(const Trapezoid& t, const Point& p, const Segment* hint = nullptr);

/// The part of a segment that lies in a trapezoid. A non-null cut point marks
/// an end strictly inside the trapezoid's x-range (an endpoint of the segment
/// or a crossing with the top or bottom edge); a null one means the segment
/// leaves through the vertical wall.
struct Piece {
    PointRef cut_left;
    PointRef cut_right;
};

std::optional<Piece> clip(const Segment& s, const Trapezoid& t);

inline bool intersects(const Segment& s, const Trapezoid& t) { return clip(s, t).has_value(); }

/// The cut c runs through t from wall to wall without leaving it.
bool spans(const Segment& c, const Trapezoid& t);

/// Vertical order of two segments over an open sheared x-interval that both
/// cover and inside which they do not cross. Returns true when b is above a.
bool above_in_slab(const Segment& a, const Segment& b, const Point& slab_left, const Point& slab_right);

/// Rejects overlapping segments in O(log n) by grouping segments per
/// supporting line.
class OverlapIndex {
public:
    /// Throws OverlapError if s overlaps a registered segment.
    void check(const Segment& s) const;
    void add(const Segment& s);
    void remove(const Segment& s);
    bool empty() const { return lines_.empty(); }

private:
    using LineKey = std::tuple<Rational, Rational, Rational>;
    static LineKey key(const Segment& s);
    std::map<LineKey, std::vector<Segment>> lines_;
};

/// Parses `decimal` or `num/den`.
Rational parse_rational(const std::string& text);

}  // namespace dyntrap
