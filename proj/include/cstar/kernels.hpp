#pragma once

#include <cstdint>
#include <vector>

#include "cstar/world.hpp"

// Data-parallel hot loops. Each kernel has a serial reference and an OpenMP
// variant that must produce identical results; tests compare them and the
// benchmark target times them.
namespace cstar::kernels {

/// Visits grid cells crossed by the ray origin + t*(cos a, sin a), t in [0, max_len),
/// in order. The visitor receives (i, j, t_enter) and returns false to stop.
template <class Visitor>
void traverse_ray(const GridGeometry& geo, Point origin, double angle, double max_len, Visitor&& visit);

void cast_rays_serial(const Environment& env, Point origin, const std::vector<double>& angles, double max_range,
                      std::vector<RayReading>& out);
void cast_rays_omp(const Environment& env, Point origin, const std::vector<double>& angles, double max_range,
                   std::vector<RayReading>& out);

/// Carves all rays of a scan into raw tri-state cells. Free is written only over
/// Unknown; Obstacle always wins. Returns the cells that left Unknown, sorted.
std::vector<int> integrate_rays_serial(const GridGeometry& geo, std::uint8_t* cells, const SensorScan& scan);
std::vector<int> integrate_rays_omp(const GridGeometry& geo, std::uint8_t* cells, const SensorScan& scan);

/// Frontier-sample qualification for a batch of candidate points (see sampling).
struct BallQuery {
    double radius{1.0};
    double clearance{0.25};
    // Optional owner box; cells outside it count like the workspace boundary.
    bool has_region{false};
    Box region{};
};
void ball_test_serial(const KnownMap& map, const std::vector<Point>& candidates, const BallQuery& q,
                      std::vector<std::uint8_t>& out);
void ball_test_omp(const KnownMap& map, const std::vector<Point>& candidates, const BallQuery& q,
                   std::vector<std::uint8_t>& out);

/// Coarse evaluation grid: per coarse cell, number of free fine cells, whether
/// any free fine cell is covered, and the total fine cells it holds.
struct CoarseCoverage {
    int cnx{0};
    int cny{0};
    std::vector<int> free_fine;
    std::vector<int> total_fine;
    std::vector<std::uint8_t> any_covered;
    std::vector<int> covered_fine;
};
CoarseCoverage evaluate_coverage_serial(const Environment& env, const std::vector<std::uint8_t>& covered,
                                        double cell_m);
CoarseCoverage evaluate_coverage_omp(const Environment& env, const std::vector<std::uint8_t>& covered,
                                     double cell_m);

// ---------------------------------------------------------------------------

template <class Visitor>
void traverse_ray(const GridGeometry& geo, Point origin, double angle, double max_len, Visitor&& visit) {
    const double res = geo.resolution_m;
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    int i = geo.cell_coord(origin.x);
    int j = geo.cell_coord(origin.y);
    constexpr double kInf = 1e300;
    int step_i = 0;
    int step_j = 0;
    double t_max_x = kInf;
    double t_max_y = kInf;
    double t_delta_x = kInf;
    double t_delta_y = kInf;
    if (dx > 1e-15) {
        step_i = 1;
        t_max_x = ((i + 1) * res - origin.x) / dx;
        t_delta_x = res / dx;
    } else if (dx < -1e-15) {
        step_i = -1;
        t_max_x = (i * res - origin.x) / dx;
        t_delta_x = -res / dx;
    }
    if (dy > 1e-15) {
        step_j = 1;
        t_max_y = ((j + 1) * res - origin.y) / dy;
        t_delta_y = res / dy;
    } else if (dy < -1e-15) {
        step_j = -1;
        t_max_y = (j * res - origin.y) / dy;
        t_delta_y = -res / dy;
    }
    double t_enter = 0.0;
    while (t_enter < max_len) {
        if (!visit(i, j, t_enter)) return;
        if (t_max_x <= t_max_y) {
            t_enter = t_max_x;
            t_max_x += t_delta_x;
            i += step_i;
        } else {
            t_enter = t_max_y;
            t_max_y += t_delta_y;
            j += step_j;
        }
    }
}

}  // namespace cstar::kernels
