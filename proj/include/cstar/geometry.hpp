#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace cstar {

struct Point {
    double x{0.0};
    double y{0.0};

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
    friend Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
    friend bool operator==(Point a, Point b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Closest distance from p to the segment [a, b]. Degenerate segments reduce to a point.
inline double point_segment_distance(Point p, Point a, Point b) {
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 <= 0.0) {
        return distance(p, a);
    }
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

/// Axis-aligned box [lo.x, hi.x) x [lo.y, hi.y).
struct Box {
    Point lo;
    Point hi;

    bool contains(Point p) const { return p.x >= lo.x && p.x < hi.x && p.y >= lo.y && p.y < hi.y; }
    bool contains_closed(Point p) const { return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y; }
};

/// Distance from a point to an axis-aligned rectangle (zero inside).
inline double point_rect_distance(Point p, Point lo, Point hi) {
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::hypot(dx, dy);
}

/// True when the closed segments [a, b] and [c, d] share a point that is not an
/// endpoint common to both. Collinear overlaps count as intersections.
bool segments_conflict(Point a, Point b, Point c, Point d);

/// Even-odd point-in-polygon test.
bool point_in_polygon(Point p, const std::vector<Point>& polygon);

/// True when no two non-adjacent edges of the closed polygon touch.
bool polygon_is_simple(const std::vector<Point>& polygon);

/// Sum of absolute heading changes along a polyline, in radians. Zero-length
/// segments are skipped.
double total_turning(const std::vector<Point>& polyline);

double polyline_length(const std::vector<Point>& polyline);

}  // namespace cstar
