#pragma once

#include <optional>
#include <vector>

#include "cstar/geometry.hpp"
#include "cstar/world.hpp"

namespace cstar {

/// Global sample lattice anchored at the start point: lap k sits at
/// x = origin.x + k*w, row j at y = origin.y + j*w.
struct Lattice {
    Point origin;
    double w{1.0};

    double lap_x(int k) const { return origin.x + k * w; }
    double row_y(int j) const { return origin.y + j * w; }
    Point at(int k, int j) const { return {lap_x(k), row_y(j)}; }
    int nearest_lap(double x) const { return static_cast<int>(std::lround((x - origin.x) / w)); }
    int nearest_row(double y) const { return static_cast<int>(std::lround((y - origin.y) / w)); }
};

struct SamplingFront {
    std::vector<int> cells;  // sorted cell indices
    int iteration{0};
};

struct LapSegment {
    double y_lo{0.0};
    double y_hi{0.0};
};

struct Lap {
    int lap_index{0};
    double x{0.0};
    int column{0};
    std::vector<LapSegment> segments;
};

struct FrontierSample {
    Point position;
    int lap_index{0};
    int row_index{0};
};

struct SamplingParams {
    double w{1.0};
    /// Minimum distance from a sample to any obstacle or boundary cell.
    double clearance{0.25};
    /// Optional owner box (fleet); cells outside count as boundary in the ball test.
    std::optional<Box> region;
};

/// New free cells minus those already sampled; marks the returned cells sampled.
SamplingFront create_sampling_front(const std::vector<int>& new_area, KnownMap& map, int iteration = 0);

/// Lap fragments of the front: maximal runs of front cells in the raster
/// column each global lap line passes through.
std::vector<Lap> generate_laps(const SamplingFront& front, const GridGeometry& geo, const Lattice& lattice);

/// True when the closed ball B(p, w) holds an Unknown, Obstacle, boundary (or
/// out-of-region) cell and p keeps the required clearance.
bool qualifies_as_frontier(const KnownMap& map, Point p, const SamplingParams& params);

/// Lattice candidates on the lap fragments that pass the ball test, ordered by
/// (lap, row).
std::vector<FrontierSample> generate_frontier_samples(const std::vector<Lap>& laps, const KnownMap& map,
                                                      const Lattice& lattice, const SamplingParams& params,
                                                      bool parallel = true);

}  // namespace cstar
