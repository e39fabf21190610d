#include "cstar/world.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

#include "cstar/kernels.hpp"

namespace cstar {

GridGeometry GridGeometry::make(double width_m, double height_m, double resolution_m) {
    if (!(width_m > 0.0) || !(height_m > 0.0) || !(resolution_m > 0.0)) {
        throw std::invalid_argument("grid dimensions must be positive");
    }
    GridGeometry g;
    g.width_m = width_m;
    g.height_m = height_m;
    g.resolution_m = resolution_m;
    g.nx = static_cast<int>(std::ceil(width_m / resolution_m - 1e-9));
    g.ny = static_cast<int>(std::ceil(height_m / resolution_m - 1e-9));
    return g;
}

int GridGeometry::cell_coord(double v) const { return static_cast<int>(std::floor(v / resolution_m + 1e-9)); }

int GridGeometry::cell_of(Point p) const {
    const int i = cell_coord(p.x);
    const int j = cell_coord(p.y);
    return in_bounds(i, j) ? index(i, j) : -1;
}

Environment::Environment(GridGeometry geo, std::vector<std::uint8_t> occupancy)
    : geo_(geo), occ_(std::move(occupancy)) {
    if (static_cast<int>(occ_.size()) != geo_.size()) throw std::invalid_argument("occupancy size mismatch");
    observable_.assign(occ_.size(), 0);
    for (int j = 0; j < geo_.ny; ++j) {
        for (int i = 0; i < geo_.nx; ++i) {
            const int idx = geo_.index(i, j);
            if (!occ_[idx]) {
                ++free_count_;
                observable_[idx] = 1;
                continue;
            }
            const bool near_free = (geo_.in_bounds(i - 1, j) && !blocked(i - 1, j)) ||
                                   (geo_.in_bounds(i + 1, j) && !blocked(i + 1, j)) ||
                                   (geo_.in_bounds(i, j - 1) && !blocked(i, j - 1)) ||
                                   (geo_.in_bounds(i, j + 1) && !blocked(i, j + 1));
            observable_[idx] = near_free ? 1 : 0;
        }
    }
}

bool Environment::is_free(Point p) const {
    const int idx = geo_.cell_of(p);
    return idx >= 0 && !occ_[idx];
}

bool Environment::free_space_connected() const {
    int start = -1;
    for (int idx = 0; idx < geo_.size(); ++idx) {
        if (!occ_[idx]) {
            start = idx;
            break;
        }
    }
    if (start < 0) return false;
    std::vector<std::uint8_t> seen(occ_.size(), 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int reached = 0;
    while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        ++reached;
        const int i = geo_.col(idx);
        const int j = geo_.row(idx);
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int ni = i + di[k];
            const int nj = j + dj[k];
            if (blocked(ni, nj)) continue;
            const int nidx = geo_.index(ni, nj);
            if (seen[nidx]) continue;
            seen[nidx] = 1;
            stack.push_back(nidx);
        }
    }
    return reached == free_count_;
}

void SensorConfig::validate() const {
    if (!(coverage_radius_m > 0.0) || !(detection_range_m > coverage_radius_m)) {
        throw std::invalid_argument("sensor ranges must satisfy r_d > r_c > 0");
    }
    if (ray_count < 8) throw std::invalid_argument("ray_count must be at least 8");
}

KnownMap::KnownMap(const GridGeometry& geo)
    : geo_(geo), cells_(geo.size(), Cell::Unknown), sampled_(geo.size(), 0), unknown_count_(geo.size()) {}

bool KnownMap::is_known_free(Point p) const {
    const int idx = geo_.cell_of(p);
    return idx >= 0 && cells_[idx] == Cell::Free;
}

bool KnownMap::is_frontier_unknown(int i, int j) const {
    if (!geo_.in_bounds(i, j) || at(i, j) != Cell::Unknown) return false;
    return (geo_.in_bounds(i - 1, j) && at(i - 1, j) == Cell::Free) ||
           (geo_.in_bounds(i + 1, j) && at(i + 1, j) == Cell::Free) ||
           (geo_.in_bounds(i, j - 1) && at(i, j - 1) == Cell::Free) ||
           (geo_.in_bounds(i, j + 1) && at(i, j + 1) == Cell::Free);
}

void KnownMap::init_observable_blocks(const Environment& env) {
    truth_ = &env;
    block_cells_ = std::max(1, static_cast<int>(std::lround(1.0 / geo_.resolution_m)));
    bnx_ = (geo_.nx + block_cells_ - 1) / block_cells_;
    bny_ = (geo_.ny + block_cells_ - 1) / block_cells_;
    block_unknown_.assign(static_cast<std::size_t>(bnx_) * bny_, 0);
    for (int idx = 0; idx < geo_.size(); ++idx) {
        if (cells_[idx] == Cell::Unknown && env.observable(idx)) {
            const int b = (geo_.row(idx) / block_cells_) * bnx_ + geo_.col(idx) / block_cells_;
            ++block_unknown_[b];
        }
    }
}

void KnownMap::note_discovered(const std::vector<int>& cells) {
    unknown_count_ -= static_cast<int>(cells.size());
    if (truth_ == nullptr) return;
    for (int idx : cells) {
        if (!truth_->observable(idx)) continue;
        const int b = (geo_.row(idx) / block_cells_) * bnx_ + geo_.col(idx) / block_cells_;
        --block_unknown_[b];
    }
}

bool KnownMap::observable_unknown_near(Point p, double radius) const {
    if (truth_ == nullptr) return true;
    const double bs = block_cells_ * geo_.resolution_m;
    const int bi0 = std::max(0, static_cast<int>(std::floor((p.x - radius) / bs)));
    const int bi1 = std::min(bnx_ - 1, static_cast<int>(std::floor((p.x + radius) / bs)));
    const int bj0 = std::max(0, static_cast<int>(std::floor((p.y - radius) / bs)));
    const int bj1 = std::min(bny_ - 1, static_cast<int>(std::floor((p.y + radius) / bs)));
    for (int bj = bj0; bj <= bj1; ++bj) {
        for (int bi = bi0; bi <= bi1; ++bi) {
            if (block_unknown_[bj * bnx_ + bi] == 0) continue;
            const Point lo{bi * bs, bj * bs};
            if (point_rect_distance(p, lo, {lo.x + bs, lo.y + bs}) <= radius) return true;
        }
    }
    return false;
}

RayReading cast_ray(const Environment& env, Point origin, double angle, double max_range) {
    std::vector<RayReading> out;
    kernels::cast_rays_serial(env, origin, {angle}, max_range, out);
    return out.front();
}

SensorScan sense(const Environment& env, const RobotPose& pose, const SensorConfig& cfg, Rng* rng) {
    const Point p = pose.position();
    if (!env.is_free(p)) throw std::runtime_error("invalid pose");
    const int n = cfg.ray_count;
    const bool full = cfg.fov_rad >= 2.0 * std::numbers::pi - 1e-12;
    std::vector<double> angles(n);
    for (int r = 0; r < n; ++r) {
        angles[r] = full ? pose.heading + 2.0 * std::numbers::pi * r / n
                         : pose.heading - cfg.fov_rad / 2.0 + cfg.fov_rad * r / (n - 1);
    }
    SensorScan scan;
    scan.origin = p;
    kernels::cast_rays_omp(env, p, angles, cfg.detection_range_m, scan.rays);

    const bool noisy = cfg.noise && cfg.noise->enabled() && rng != nullptr;
    if (!noisy) return scan;
    const NoiseConfig& nz = *cfg.noise;
    std::normal_distribution<double> unit(0.0, 1.0);
    const double heading_err = nz.sigma_compass_rad * unit(*rng);
    const double ex = nz.sigma_localization_m * unit(*rng);
    const double ey = nz.sigma_localization_m * unit(*rng);
    scan.origin = {p.x + ex, p.y + ey};
    for (RayReading& ray : scan.rays) {
        const double range_err = nz.sigma_laser_m * unit(*rng);
        ray.angle += heading_err;
        ray.cell = -1;
        if (ray.hit) ray.range = std::clamp(ray.range + range_err, 0.0, cfg.detection_range_m);
    }
    return scan;
}

std::vector<int> integrate_scan(KnownMap& map, const SensorScan& scan) {
    auto fresh = kernels::integrate_rays_omp(map.geometry(), map.raw_cells(), scan);
    map.note_discovered(fresh);
    return fresh;
}

bool CoverageMask::covered_at(Point p) const {
    const int idx = geo_.cell_of(p);
    return idx >= 0 && covered_[idx] != 0;
}

int CoverageMask::covered_count() const {
    return static_cast<int>(std::count(covered_.begin(), covered_.end(), std::uint8_t{1}));
}

int CoverageMask::mark(const Environment& env, Point a, Point b, double radius) {
    const double res = geo_.resolution_m;
    const int i0 = std::max(0, static_cast<int>(std::floor((std::min(a.x, b.x) - radius) / res)));
    const int i1 = std::min(geo_.nx - 1, static_cast<int>(std::floor((std::max(a.x, b.x) + radius) / res)));
    const int j0 = std::max(0, static_cast<int>(std::floor((std::min(a.y, b.y) - radius) / res)));
    const int j1 = std::min(geo_.ny - 1, static_cast<int>(std::floor((std::max(a.y, b.y) + radius) / res)));
    int flipped = 0;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const int idx = geo_.index(i, j);
            if (covered_[idx] || env.blocked(idx)) continue;
            if (point_segment_distance(geo_.center(i, j), a, b) <= radius + 1e-12) {
                covered_[idx] = 1;
                ++flipped;
            }
        }
    }
    return flipped;
}

int mark_covered(CoverageMask& mask, const Environment& env, Point a, Point b, double radius) {
    return mask.mark(env, a, b, radius);
}

}  // namespace cstar
