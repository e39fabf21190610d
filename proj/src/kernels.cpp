#include "cstar/kernels.hpp"

#include <algorithm>
#include <atomic>

namespace cstar::kernels {
namespace {

RayReading cast_one(const Environment& env, Point origin, double angle, double max_range) {
    const GridGeometry& geo = env.geometry();
    RayReading out{angle, max_range, false};
    bool first = true;
    traverse_ray(geo, origin, angle, max_range, [&](int i, int j, double t) {
        if (first) {
            first = false;
            return true;
        }
        if (!geo.in_bounds(i, j) || env.blocked(i, j)) {
            out.range = t;
            out.hit = true;
            if (geo.in_bounds(i, j)) out.cell = geo.index(i, j);
            return false;
        }
        return true;
    });
    return out;
}

inline bool try_free(std::uint8_t& cell) {
    std::atomic_ref<std::uint8_t> ref(cell);
    std::uint8_t expected = static_cast<std::uint8_t>(Cell::Unknown);
    return ref.compare_exchange_strong(expected, static_cast<std::uint8_t>(Cell::Free), std::memory_order_relaxed);
}

inline bool set_obstacle(std::uint8_t& cell) {
    std::atomic_ref<std::uint8_t> ref(cell);
    const auto old = ref.exchange(static_cast<std::uint8_t>(Cell::Obstacle), std::memory_order_relaxed);
    return old == static_cast<std::uint8_t>(Cell::Unknown);
}

template <class Sink>
void carve_ray(const GridGeometry& geo, std::uint8_t* cells, Point origin, const RayReading& ray, Sink&& sink) {
    traverse_ray(geo, origin, ray.angle, ray.range, [&](int i, int j, double t) {
        if (!geo.in_bounds(i, j) || t >= ray.range) return false;
        const int idx = geo.index(i, j);
        if (try_free(cells[idx])) sink(idx);
        return true;
    });
    if (!ray.hit) return;
    if (ray.cell >= 0) {
        if (set_obstacle(cells[ray.cell])) sink(ray.cell);
        return;
    }
    // Perturbed reading: the hit cell is the one just past the end point.
    const double reach = ray.range + 1e-9;
    const double x = origin.x + reach * std::cos(ray.angle);
    const double y = origin.y + reach * std::sin(ray.angle);
    const int i = static_cast<int>(std::floor(x / geo.resolution_m));
    const int j = static_cast<int>(std::floor(y / geo.resolution_m));
    if (x < 0.0 || y < 0.0 || !geo.in_bounds(i, j)) return;
    const int idx = geo.index(i, j);
    if (set_obstacle(cells[idx])) sink(idx);
}

Point clamp_origin(const GridGeometry& geo, Point p) {
    const double eps = 1e-9;
    return {std::clamp(p.x, eps, geo.width_m - eps), std::clamp(p.y, eps, geo.height_m - eps)};
}

bool ball_qualifies(const KnownMap& map, Point p, const BallQuery& q) {
    const GridGeometry& geo = map.geometry();
    const double res = geo.resolution_m;
    const double reach = std::max(q.radius, q.clearance);
    const int i0 = static_cast<int>(std::floor((p.x - reach) / res));
    const int i1 = static_cast<int>(std::floor((p.x + reach) / res));
    const int j0 = static_cast<int>(std::floor((p.y - reach) / res));
    const int j1 = static_cast<int>(std::floor((p.y + reach) / res));
    bool touches = false;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const Point lo{i * res, j * res};
            const Point hi{lo.x + res, lo.y + res};
            const double d = point_rect_distance(p, lo, hi);
            if (d > reach) continue;
            const bool inside = geo.in_bounds(i, j);
            const bool hard = !inside || map.at(i, j) == Cell::Obstacle;
            if (hard && d <= q.clearance) return false;
            if (d > q.radius || touches) continue;
            if (hard || map.at(i, j) == Cell::Unknown) {
                touches = true;
            } else if (q.has_region && !q.region.contains(geo.center(i, j))) {
                touches = true;
            }
        }
    }
    return touches;
}

}  // namespace

void cast_rays_serial(const Environment& env, Point origin, const std::vector<double>& angles, double max_range,
                      std::vector<RayReading>& out) {
    out.resize(angles.size());
    for (std::size_t r = 0; r < angles.size(); ++r) out[r] = cast_one(env, origin, angles[r], max_range);
}

void cast_rays_omp(const Environment& env, Point origin, const std::vector<double>& angles, double max_range,
                   std::vector<RayReading>& out) {
    out.resize(angles.size());
    const long n = static_cast<long>(angles.size());
#pragma omp parallel for schedule(static)
    for (long r = 0; r < n; ++r) out[r] = cast_one(env, origin, angles[r], max_range);
}

std::vector<int> integrate_rays_serial(const GridGeometry& geo, std::uint8_t* cells, const SensorScan& scan) {
    std::vector<int> fresh;
    const Point origin = clamp_origin(geo, scan.origin);
    for (const RayReading& ray : scan.rays) {
        carve_ray(geo, cells, origin, ray, [&](int idx) { fresh.push_back(idx); });
    }
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    return fresh;
}

std::vector<int> integrate_rays_omp(const GridGeometry& geo, std::uint8_t* cells, const SensorScan& scan) {
    std::vector<int> fresh;
    const Point origin = clamp_origin(geo, scan.origin);
    const long n = static_cast<long>(scan.rays.size());
#pragma omp parallel
    {
        std::vector<int> local;
#pragma omp for schedule(static) nowait
        for (long r = 0; r < n; ++r) {
            carve_ray(geo, cells, origin, scan.rays[r], [&](int idx) { local.push_back(idx); });
        }
#pragma omp critical(cstar_integrate_merge)
        fresh.insert(fresh.end(), local.begin(), local.end());
    }
    std::sort(fresh.begin(), fresh.end());
    fresh.erase(std::unique(fresh.begin(), fresh.end()), fresh.end());
    return fresh;
}

void ball_test_serial(const KnownMap& map, const std::vector<Point>& candidates, const BallQuery& q,
                      std::vector<std::uint8_t>& out) {
    out.assign(candidates.size(), 0);
    for (std::size_t c = 0; c < candidates.size(); ++c) out[c] = ball_qualifies(map, candidates[c], q) ? 1 : 0;
}

void ball_test_omp(const KnownMap& map, const std::vector<Point>& candidates, const BallQuery& q,
                   std::vector<std::uint8_t>& out) {
    out.assign(candidates.size(), 0);
    const long n = static_cast<long>(candidates.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long c = 0; c < n; ++c) out[c] = ball_qualifies(map, candidates[c], q) ? 1 : 0;
}

namespace {

CoarseCoverage coarse_shape(const GridGeometry& geo, double cell_m, int& per) {
    per = std::max(1, static_cast<int>(std::lround(cell_m / geo.resolution_m)));
    CoarseCoverage out;
    out.cnx = (geo.nx + per - 1) / per;
    out.cny = (geo.ny + per - 1) / per;
    const auto n = static_cast<std::size_t>(out.cnx) * out.cny;
    out.free_fine.assign(n, 0);
    out.total_fine.assign(n, 0);
    out.any_covered.assign(n, 0);
    out.covered_fine.assign(n, 0);
    return out;
}

void fill_coarse(const Environment& env, const std::vector<std::uint8_t>& covered, int per, CoarseCoverage& out,
                 int c) {
    const GridGeometry& geo = env.geometry();
    const int ci = c % out.cnx;
    const int cj = c / out.cnx;
    int free_cells = 0;
    int total = 0;
    int hit = 0;
    for (int j = cj * per; j < std::min(geo.ny, (cj + 1) * per); ++j) {
        for (int i = ci * per; i < std::min(geo.nx, (ci + 1) * per); ++i) {
            const int idx = geo.index(i, j);
            ++total;
            if (env.blocked(idx)) continue;
            ++free_cells;
            if (covered[idx]) ++hit;
        }
    }
    out.free_fine[c] = free_cells;
    out.total_fine[c] = total;
    out.covered_fine[c] = hit;
    out.any_covered[c] = hit > 0 ? 1 : 0;
}

}  // namespace

CoarseCoverage evaluate_coverage_serial(const Environment& env, const std::vector<std::uint8_t>& covered,
                                        double cell_m) {
    int per = 1;
    CoarseCoverage out = coarse_shape(env.geometry(), cell_m, per);
    const int n = out.cnx * out.cny;
    for (int c = 0; c < n; ++c) fill_coarse(env, covered, per, out, c);
    return out;
}

CoarseCoverage evaluate_coverage_omp(const Environment& env, const std::vector<std::uint8_t>& covered,
                                     double cell_m) {
    int per = 1;
    CoarseCoverage out = coarse_shape(env.geometry(), cell_m, per);
    const int n = out.cnx * out.cny;
#pragma omp parallel for schedule(static)
    for (int c = 0; c < n; ++c) fill_coarse(env, covered, per, out, c);
    return out;
}

}  // namespace cstar::kernels
