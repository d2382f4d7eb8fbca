#include "dyntrap/geometry.h"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace dyntrap {

namespace {

constexpr std::int64_t kSmallLimit = std::int64_t{1} << 60;

bool fits_small(const Rational& v, std::int64_t& out) {
    if (mpz_cmp_ui(v.get_den_mpz_t(), 1) != 0) return false;
    if (!mpz_fits_slong_p(v.get_num_mpz_t())) return false;
    long n = mpz_get_si(v.get_num_mpz_t());
    if (n > kSmallLimit || n < -kSmallLimit) return false;
    out = n;
    return true;
}

int sign_of(const Rational& v) { return sgn(v); }

std::strong_ordering cmp_rational(const Rational& a, const Rational& b) {
    int c = cmp(a, b);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

// Side of the hint segment next to p, measured against the line of e.
Side hint_side(const Segment& e, const Point& p, const Segment& hint) {
    const Point& toward = (p == hint.right()) ? hint.left() : hint.right();
    int o = orient(e.left(), e.right(), toward);
    if (o > 0) return Side::Plus;
    if (o < 0) return Side::Minus;
    return Side::On;
}

}  // namespace

Point::Point(Rational x, Rational y) : x_(std::move(x)), y_(std::move(y)) {
    x_.canonicalize();
    y_.canonicalize();
    small_ = fits_small(x_, ix_) && fits_small(y_, iy_);
}

std::string Point::str() const {
    return "(" + x_.get_str() + ", " + y_.get_str() + ")";
}

bool operator==(const Point& a, const Point& b) {
    if (a.small_ && b.small_) return a.ix_ == b.ix_ && a.iy_ == b.iy_;
    return a.x_ == b.x_ && a.y_ == b.y_;
}

std::strong_ordering cmp_sheared(const Point& a, const Point& b) {
    if (a.small() && b.small()) {
        if (a.ix() != b.ix()) return a.ix() <=> b.ix();
        return a.iy() <=> b.iy();
    }
    auto c = cmp_rational(a.x(), b.x());
    if (c != 0) return c;
    return cmp_rational(a.y(), b.y());
}

int orient(const Point& a, const Point& b, const Point& c) {
    if (a.small() && b.small() && c.small()) {
        __int128 l = static_cast<__int128>(b.ix() - a.ix()) * (c.iy() - a.iy());
        __int128 r = static_cast<__int128>(b.iy() - a.iy()) * (c.ix() - a.ix());
        return (l > r) - (l < r);
    }
    return sign_of(orient_value(a, b, c));
}

Rational orient_value(const Point& a, const Point& b, const Point& c) {
    Rational v = (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
    return v;
}

Segment::Segment(SegId id, Point a, Point b)
    : Segment(id, std::make_shared<const Point>(std::move(a)), std::make_shared<const Point>(std::move(b))) {}

Segment::Segment(SegId id, PointRef a, PointRef b) : id_(id) {
    auto c = cmp_sheared(*a, *b);
    if (c == 0) throw GeometryError("degenerate segment at " + a->str());
    if (c < 0) {
        left_ = std::move(a);
        right_ = std::move(b);
    } else {
        left_ = std::move(b);
        right_ = std::move(a);
    }
}

std::string Segment::str() const {
    return "#" + std::to_string(id_) + " " + left_->str() + "-" + right_->str();
}

const char* to_string(Side s) {
    switch (s) {
        case Side::Minus: return "minus";
        case Side::Plus: return "plus";
        case Side::On: return "on";
    }
    return "?";
}

Side side_of_edge(const Segment& e, const Point& p, const Segment* hint) {
    int o = orient(e.left(), e.right(), p);
    if (o > 0) return Side::Plus;
    if (o < 0) return Side::Minus;
    if (hint) return hint_side(e, p, *hint);
    return Side::On;
}

Side side_of_vertical(const Point& q, const Point& p, const Segment* hint) {
    auto c = cmp_sheared(p, q);
    if (c < 0) return Side::Minus;
    if (c > 0) return Side::Plus;
    if (hint && p == hint->right()) return Side::Minus;
    return Side::Plus;
}

Point line_crossing(const Segment& s, const Segment& e) {
    Rational o1 = orient_value(e.left(), e.right(), s.left());
    Rational o2 = orient_value(e.left(), e.right(), s.right());
    Rational t = o1 / (o1 - o2);
    return Point(s.left().x() + t * (s.right().x() - s.left().x()),
                 s.left().y() + t * (s.right().y() - s.left().y()));
}

namespace {

bool lex_overlap(const Segment& a, const Segment& b) {
    const Point& lo = cmp_sheared(a.left(), b.left()) < 0 ? b.left() : a.left();
    const Point& hi = cmp_sheared(a.right(), b.right()) < 0 ? a.right() : b.right();
    return cmp_sheared(lo, hi) < 0;
}

}  // namespace

bool overlapping(const Segment& a, const Segment& b) {
    if (orient(a.left(), a.right(), b.left()) != 0) return false;
    if (orient(a.left(), a.right(), b.right()) != 0) return false;
    return lex_overlap(a, b);
}

std::optional<Point> crossing_point(const Segment& s1, const Segment& s2) {
    int o1 = orient(s1.left(), s1.right(), s2.left());
    int o2 = orient(s1.left(), s1.right(), s2.right());
    if (o1 == 0 && o2 == 0) {
        if (lex_overlap(s1, s2)) throw OverlapError("overlapping segments " + s1.str() + " and " + s2.str());
        return std::nullopt;
    }
    if (o1 * o2 >= 0) return std::nullopt;
    int o3 = orient(s2.left(), s2.right(), s1.left());
    int o4 = orient(s2.left(), s2.right(), s1.right());
    if (o3 * o4 >= 0) return std::nullopt;
    return line_crossing(s2, s1);
}

bool Domain::contains_strictly(const Point& p) const {
    return xmin < p.x() && p.x() < xmax && ymin < p.y() && p.y() < ymax;
}

bool Domain::contains_strictly(const Segment& s) const {
    return contains_strictly(s.left()) && contains_strictly(s.right());
}

std::string Trapezoid::str() const {
    std::ostringstream out;
    out << "[" << (left ? left->str() : "-inf") << " .. " << (right ? right->str() : "+inf") << " | top "
        << (top ? std::to_string(top->id()) : "dom") << " bottom " << (bottom ? std::to_string(bottom->id()) : "dom")
        << "]";
    return out.str();
}

bool same_point(const PointRef& a, const PointRef& b) {
    if (!a || !b) return !a && !b;
    return a == b || *a == *b;
}

bool same_segment(const Segment* a, const Segment* b) {
    if (!a || !b) return !a && !b;
    return a->id() == b->id();
}

bool same_region(const Trapezoid& a, const Trapezoid& b) {
    return same_point(a.left, b.left) && same_point(a.right, b.right) && same_segment(a.top, b.top) &&
           same_segment(a.bottom, b.bottom);
}

std::strong_ordering cmp_left_bound(const PointRef& a, const PointRef& b) {
    if (!a || !b) return (!a && !b) ? std::strong_ordering::equal : (!a ? std::strong_ordering::less : std::strong_ordering::greater);
    return cmp_sheared(*a, *b);
}

std::strong_ordering cmp_right_bound(const PointRef& a, const PointRef& b) {
    if (!a || !b) return (!a && !b) ? std::strong_ordering::equal : (!a ? std::strong_ordering::greater : std::strong_ordering::less);
    return cmp_sheared(*a, *b);
}

bool trapezoid_valid(const Trapezoid& t) {
    if (t.left && t.right && cmp_sheared(*t.left, *t.right) >= 0) return false;
    if (t.top && t.bottom) {
        // The top must cover the lex range, and the bottom must stay below it
        // somewhere inside; both are non-crossing inside the range by construction.
        if (t.top->id() == t.bottom->id()) return false;
        const Point& lo = t.left ? *t.left : (cmp_sheared(t.top->left(), t.bottom->left()) < 0 ? t.bottom->left() : t.top->left());
        const Point& hi = t.right ? *t.right : (cmp_sheared(t.top->right(), t.bottom->right()) < 0 ? t.top->right() : t.bottom->right());
        if (cmp_sheared(lo, hi) >= 0) return false;
        return above_in_slab(*t.bottom, *t.top, lo, hi);
    }
    return true;
}

bool trapezoid_contains(const Trapezoid& t, const Point& p, const Segment* hint) {
    if (t.left && side_of_vertical(*t.left, p, hint) != Side::Plus) return false;
    if (t.right && side_of_vertical(*t.right, p, hint) != Side::Minus) return false;
    if (t.top && side_of_edge(*t.top, p, hint) != Side::Minus) return false;
    if (t.bottom && side_of_edge(*t.bottom, p, hint) == Side::Minus) return false;
    return true;
}

std::optional<Piece> clip(const Segment& s, const Trapezoid& t) {
    PointRef lo = s.left_ref();
    PointRef hi = s.right_ref();
    bool lo_cut = true;
    bool hi_cut = true;
    if (t.left && cmp_sheared(*t.left, s.left()) >= 0) {
        lo = t.left;
        lo_cut = false;
    }
    if (t.right && cmp_sheared(*t.right, s.right()) <= 0) {
        hi = t.right;
        hi_cut = false;
    }
    if (cmp_sheared(*lo, *hi) >= 0) return std::nullopt;

    if (t.top) {
        int o1 = orient(t.top->left(), t.top->right(), s.left());
        int o2 = orient(t.top->left(), t.top->right(), s.right());
        if (o1 >= 0 && o2 >= 0) return std::nullopt;
        if (o1 * o2 < 0) {
            auto x = std::make_shared<const Point>(line_crossing(s, *t.top));
            if (o1 < 0) {
                if (cmp_sheared(*x, *hi) < 0) {
                    hi = x;
                    hi_cut = true;
                }
            } else if (cmp_sheared(*x, *lo) > 0) {
                lo = x;
                lo_cut = true;
            }
        }
    }
    if (t.bottom) {
        int o1 = orient(t.bottom->left(), t.bottom->right(), s.left());
        int o2 = orient(t.bottom->left(), t.bottom->right(), s.right());
        if (o1 <= 0 && o2 <= 0) return std::nullopt;
        if (o1 * o2 < 0) {
            auto x = std::make_shared<const Point>(line_crossing(s, *t.bottom));
            if (o1 > 0) {
                if (cmp_sheared(*x, *hi) < 0) {
                    hi = x;
                    hi_cut = true;
                }
            } else if (cmp_sheared(*x, *lo) > 0) {
                lo = x;
                lo_cut = true;
            }
        }
    }
    if (cmp_sheared(*lo, *hi) >= 0) return std::nullopt;
    return Piece{lo_cut ? lo : nullptr, hi_cut ? hi : nullptr};
}

bool spans(const Segment& c, const Trapezoid& t) {
    auto piece = clip(c, t);
    return piece && !piece->cut_left && !piece->cut_right;
}

bool above_in_slab(const Segment& a, const Segment& b, const Point& slab_left, const Point& slab_right) {
    int o1 = orient(a.left(), a.right(), b.left());
    int o2 = orient(a.left(), a.right(), b.right());
    if (o1 == 0 && o2 == 0) throw OverlapError("collinear segments share a slab");
    if (o1 * o2 >= 0) return o1 + o2 > 0;
    Point x = line_crossing(b, a);
    if (cmp_sheared(x, slab_left) <= 0) return o2 > 0;
    if (cmp_sheared(x, slab_right) >= 0) return o1 > 0;
    throw GeometryError("segments cross inside slab");
}

OverlapIndex::LineKey OverlapIndex::key(const Segment& s) {
    Rational a = s.right().y() - s.left().y();
    Rational b = s.left().x() - s.right().x();
    if (a != 0) {
        b /= a;
        a = 1;
    } else {
        a = 0;
        b = 1;
    }
    Rational c = a * s.left().x() + b * s.left().y();
    return {a, b, c};
}

void OverlapIndex::check(const Segment& s) const {
    auto it = lines_.find(key(s));
    if (it == lines_.end()) return;
    for (const Segment& other : it->second) {
        if (lex_overlap(s, other)) throw OverlapError("segment " + s.str() + " overlaps " + other.str());
    }
}

void OverlapIndex::add(const Segment& s) { lines_[key(s)].push_back(s); }

void OverlapIndex::remove(const Segment& s) {
    auto it = lines_.find(key(s));
    if (it == lines_.end()) return;
    auto& v = it->second;
    v.erase(std::remove_if(v.begin(), v.end(), [&](const Segment& o) { return o.id() == s.id(); }), v.end());
    if (v.empty()) lines_.erase(it);
}

Rational parse_rational(const std::string& text) {
    std::string t = text;
    if (t.empty()) throw std::invalid_argument("empty number");
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        Rational r;
        if (r.set_str(t, 10) != 0) throw std::invalid_argument("bad rational '" + text + "'");
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        r.canonicalize();
        return r;
    }
    std::size_t i = 0;
    bool neg = false;
    if (t[i] == '+' || t[i] == '-') neg = t[i++] == '-';
    std::string digits;
    std::size_t frac = 0;
    bool dot = false;
    for (; i < t.size(); ++i) {
        char ch = t[i];
        if (ch == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits.push_back(ch);
            if (dot) ++frac;
        } else {
            throw std::invalid_argument("bad number '" + text + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("bad number '" + text + "'");
    mpz_class num(digits, 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac);
    Rational r(neg ? mpz_class(-num) : num, den);
    r.canonicalize();
    return r;
}

}  // namespace dyntrap
