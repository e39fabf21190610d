#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cstar/geometry.hpp"

namespace cstar {

enum class Cell : std::uint8_t { Unknown = 0, Free = 1, Obstacle = 2 };

/// Row-major raster over [0, width] x [0, height]; column i spans x, row j spans y.
struct GridGeometry {
    double width_m{0.0};
    double height_m{0.0};
    double resolution_m{0.1};
    int nx{0};
    int ny{0};

    static GridGeometry make(double width_m, double height_m, double resolution_m);

    int size() const { return nx * ny; }
    bool in_bounds(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
    int index(int i, int j) const { return j * nx + i; }
    int col(int idx) const { return idx % nx; }
    int row(int idx) const { return idx / nx; }
    /// Cell coordinate of a length along an axis; a tiny bias keeps lattice
    /// points that sit exactly on a cell boundary in the upper cell.
    int cell_coord(double v) const;
    int cell_of(Point p) const;  // -1 when outside
    Point center(int i, int j) const {
        return {(i + 0.5) * resolution_m, (j + 0.5) * resolution_m};
    }
    Point center(int idx) const { return center(col(idx), row(idx)); }
    bool contains(Point p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x < width_m && p.y < height_m; }
};

class Environment {
public:
    Environment() = default;
    Environment(GridGeometry geo, std::vector<std::uint8_t> occupancy);

    const GridGeometry& geometry() const { return geo_; }
    bool blocked(int i, int j) const { return !geo_.in_bounds(i, j) || occ_[geo_.index(i, j)] != 0; }
    bool blocked(int idx) const { return occ_[idx] != 0; }
    bool is_free(Point p) const;
    const std::vector<std::uint8_t>& occupancy() const { return occ_; }
    int free_cell_count() const { return free_count_; }

    /// Obstacle cells with a free 4-neighbour together with all free cells:
    /// the only cells a ray traversal can ever label.
    bool observable(int idx) const { return observable_[idx] != 0; }

    /// Single 4-connected free component.
    bool free_space_connected() const;

private:
    GridGeometry geo_;
    std::vector<std::uint8_t> occ_;
    std::vector<std::uint8_t> observable_;
    int free_count_{0};
};

struct NoiseConfig {
    double sigma_laser_m{0.0};
    double sigma_compass_rad{0.0};
    double sigma_localization_m{0.0};

    bool enabled() const { return sigma_laser_m > 0.0 || sigma_compass_rad > 0.0 || sigma_localization_m > 0.0; }
};

struct SensorConfig {
    double detection_range_m{15.0};
    double fov_rad{2.0 * 3.14159265358979323846};
    int ray_count{1440};
    double coverage_radius_m{0.5};
    std::optional<NoiseConfig> noise;

    void validate() const;
};

struct RobotPose {
    double x{0.0};
    double y{0.0};
    double heading{0.0};

    Point position() const { return {x, y}; }
};

struct RayReading {
    double angle{0.0};
    double range{0.0};
    bool hit{false};
    int cell{-1};  // grid index of the hit cell while the reading is exact
};

/// Rays as registered in the map frame: origin and angles carry the
/// localization/compass error when noise is on.
struct SensorScan {
    Point origin;
    std::vector<RayReading> rays;
};

class KnownMap {
public:
    KnownMap() = default;
    explicit KnownMap(const GridGeometry& geo);

    const GridGeometry& geometry() const { return geo_; }
    Cell at(int idx) const { return cells_[idx]; }
    Cell at(int i, int j) const { return cells_[geo_.index(i, j)]; }
    bool sampled(int idx) const { return sampled_[idx] != 0; }
    void mark_sampled(int idx) { sampled_[idx] = 1; }
    std::uint8_t* raw_cells() { return reinterpret_cast<std::uint8_t*>(cells_.data()); }

    int unknown_count() const { return unknown_count_; }
    bool is_known_free(Point p) const;

    /// Unknown cell bordering a known free cell (the boundary of the unknown
    /// area seen from free space).
    bool is_frontier_unknown(int i, int j) const;

    /// Book-keeping after cells left the Unknown state.
    void note_discovered(const std::vector<int>& cells);

    /// True if some observable cell within `radius` of p is still Unknown.
    bool observable_unknown_near(Point p, double radius) const;

    /// Enables the scan-skip index. Simulation only: it consults ground truth
    /// to know which cells a ray could ever reach.
    void init_observable_blocks(const Environment& env);

private:
    GridGeometry geo_;
    std::vector<Cell> cells_;
    std::vector<std::uint8_t> sampled_;
    int unknown_count_{0};
    int block_cells_{10};
    int bnx_{0};
    int bny_{0};
    std::vector<int> block_unknown_;
    const Environment* truth_{nullptr};
};

/// Ray traversal against ground truth. Exact grid DDA; the workspace boundary
/// counts as a hit.
RayReading cast_ray(const Environment& env, Point origin, double angle, double max_range);

using Rng = std::mt19937_64;

SensorScan sense(const Environment& env, const RobotPose& pose, const SensorConfig& cfg, Rng* rng = nullptr);

/// Carve rays into the map. Returns cells that left the Unknown state, sorted.
std::vector<int> integrate_scan(KnownMap& map, const SensorScan& scan);

class CoverageMask {
public:
    CoverageMask() = default;
    explicit CoverageMask(const GridGeometry& geo) : geo_(geo), covered_(geo.size(), 0) {}

    const GridGeometry& geometry() const { return geo_; }
    bool covered(int idx) const { return covered_[idx] != 0; }
    bool covered_at(Point p) const;
    int covered_count() const;
    const std::vector<std::uint8_t>& data() const { return covered_; }

    /// Marks free cells whose centre is within radius of [a, b]; returns how many flipped.
    int mark(const Environment& env, Point a, Point b, double radius);

private:
    GridGeometry geo_;
    std::vector<std::uint8_t> covered_;
};

int mark_covered(CoverageMask& mask, const Environment& env, Point a, Point b, double radius);

}  // namespace cstar
