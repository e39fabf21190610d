#include "cstar/geometry.hpp"

#include <numbers>

namespace cstar {
namespace {

constexpr double kEps = 1e-12;

int orientation(Point a, Point b, Point c) {
    const double v = cross(b - a, c - a);
    if (v > kEps) return 1;
    if (v < -kEps) return -1;
    return 0;
}

bool on_segment(Point a, Point b, Point p) {
    return std::min(a.x, b.x) - kEps <= p.x && p.x <= std::max(a.x, b.x) + kEps &&
           std::min(a.y, b.y) - kEps <= p.y && p.y <= std::max(a.y, b.y) + kEps;
}

bool same_point(Point a, Point b) { return std::abs(a.x - b.x) <= 1e-9 && std::abs(a.y - b.y) <= 1e-9; }

}  // namespace

bool segments_conflict(Point a, Point b, Point c, Point d) {
    const bool share_ac = same_point(a, c);
    const bool share_ad = same_point(a, d);
    const bool share_bc = same_point(b, c);
    const bool share_bd = same_point(b, d);
    const int shared = int(share_ac) + int(share_ad) + int(share_bc) + int(share_bd);

    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);

    if (shared >= 2) {
        return true;  // parallel edge
    }
    if (shared == 1) {
        // Only a collinear overlap beyond the shared endpoint is a conflict.
        if (o1 != 0 || o2 != 0) return false;
        const Point common = (share_ac || share_ad) ? a : b;
        const Point other_ab = (share_ac || share_ad) ? b : a;
        const Point other_cd = (share_ac || share_bc) ? d : c;
        return dot(other_ab - common, other_cd - common) > 0.0;
    }
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool point_in_polygon(Point p, const std::vector<Point>& polygon) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& pi = polygon[i];
        const Point& pj = polygon[j];
        if ((pi.y > p.y) != (pj.y > p.y)) {
            const double x_cross = pj.x + (p.y - pj.y) * (pi.x - pj.x) / (pi.y - pj.y);
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool polygon_is_simple(const std::vector<Point>& polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        if (same_point(polygon[i], polygon[(i + 1) % n])) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon[i];
        const Point b = polygon[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const Point c = polygon[j];
            const Point d = polygon[(j + 1) % n];
            if (adjacent) {
                // Neighbouring edges may only meet at their shared vertex.
                if (segments_conflict(a, b, c, d)) return false;
                continue;
            }
            if (segments_conflict(a, b, c, d)) return false;
        }
    }
    return true;
}

double total_turning(const std::vector<Point>& polyline) {
    double total = 0.0;
    bool have_prev = false;
    double prev_heading = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const Point d = polyline[i] - polyline[i - 1];
        if (norm(d) <= 1e-9) continue;
        const double heading = std::atan2(d.y, d.x);
        if (have_prev) {
            double delta = heading - prev_heading;
            while (delta > std::numbers::pi) delta -= 2.0 * std::numbers::pi;
            while (delta < -std::numbers::pi) delta += 2.0 * std::numbers::pi;
            total += std::abs(delta);
        }
        prev_heading = heading;
        have_prev = true;
    }
    return total;
}

double polyline_length(const std::vector<Point>& polyline) {
    double total = 0.0;
    for (std::size_t i = 1; i < polyline.size(); ++i) total += distance(polyline[i], polyline[i - 1]);
    return total;
}

}  // namespace cstar
