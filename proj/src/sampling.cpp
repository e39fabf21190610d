#include "cstar/sampling.hpp"

#include <algorithm>
#include <map>

#include "cstar/kernels.hpp"

namespace cstar {
namespace {

kernels::BallQuery make_query(const SamplingParams& params) {
    kernels::BallQuery q;
    q.radius = params.w;
    q.clearance = params.clearance;
    if (params.region) {
        q.has_region = true;
        q.region = *params.region;
    }
    return q;
}

}  // namespace

SamplingFront create_sampling_front(const std::vector<int>& new_area, KnownMap& map, int iteration) {
    SamplingFront front;
    front.iteration = iteration;
    for (int idx : new_area) {
        if (map.at(idx) != Cell::Free || map.sampled(idx)) continue;
        map.mark_sampled(idx);
        front.cells.push_back(idx);
    }
    std::sort(front.cells.begin(), front.cells.end());
    front.cells.erase(std::unique(front.cells.begin(), front.cells.end()), front.cells.end());
    return front;
}

std::vector<Lap> generate_laps(const SamplingFront& front, const GridGeometry& geo, const Lattice& lattice) {
    // Which raster column does each lap line run through, and which laps
    // touch a given column.
    std::map<int, std::vector<int>> rows_by_lap;
    for (int idx : front.cells) {
        const int i = geo.col(idx);
        const double x_lo = i * geo.resolution_m;
        const double x_hi = x_lo + geo.resolution_m;
        const int k_lo = static_cast<int>(std::ceil((x_lo - lattice.origin.x) / lattice.w - 1e-9));
        const int k_hi = static_cast<int>(std::floor((x_hi - lattice.origin.x) / lattice.w + 1e-9));
        for (int k = k_lo; k <= k_hi; ++k) {
            if (geo.cell_coord(lattice.lap_x(k)) == i) rows_by_lap[k].push_back(geo.row(idx));
        }
    }
    std::vector<Lap> laps;
    for (auto& [k, rows] : rows_by_lap) {
        std::sort(rows.begin(), rows.end());
        Lap lap;
        lap.lap_index = k;
        lap.x = lattice.lap_x(k);
        lap.column = geo.cell_coord(lap.x);
        std::size_t a = 0;
        while (a < rows.size()) {
            std::size_t b = a;
            while (b + 1 < rows.size() && rows[b + 1] == rows[b] + 1) ++b;
            lap.segments.push_back({rows[a] * geo.resolution_m, (rows[b] + 1) * geo.resolution_m});
            a = b + 1;
        }
        laps.push_back(std::move(lap));
    }
    return laps;
}

bool qualifies_as_frontier(const KnownMap& map, Point p, const SamplingParams& params) {
    std::vector<std::uint8_t> out;
    kernels::ball_test_serial(map, {p}, make_query(params), out);
    return out.front() != 0;
}

std::vector<FrontierSample> generate_frontier_samples(const std::vector<Lap>& laps, const KnownMap& map,
                                                      const Lattice& lattice, const SamplingParams& params,
                                                      bool parallel) {
    const GridGeometry& geo = map.geometry();
    std::vector<FrontierSample> candidates;
    for (const Lap& lap : laps) {
        for (const LapSegment& seg : lap.segments) {
            const int j_lo = static_cast<int>(std::ceil((seg.y_lo - lattice.origin.y) / lattice.w - 1e-9));
            const int j_hi = static_cast<int>(std::floor((seg.y_hi - lattice.origin.y) / lattice.w + 1e-9));
            for (int j = j_lo; j <= j_hi; ++j) {
                const Point p = lattice.at(lap.lap_index, j);
                const int cell = geo.cell_of(p);
                if (cell < 0 || map.at(cell) != Cell::Free) continue;
                const double cy = geo.center(cell).y;
                if (cy < seg.y_lo || cy > seg.y_hi) continue;
                candidates.push_back({p, lap.lap_index, j});
            }
        }
    }
    std::vector<Point> pts;
    pts.reserve(candidates.size());
    for (const auto& c : candidates) pts.push_back(c.position);
    std::vector<std::uint8_t> ok;
    if (parallel) {
        kernels::ball_test_omp(map, pts, make_query(params), ok);
    } else {
        kernels::ball_test_serial(map, pts, make_query(params), ok);
    }
    std::vector<FrontierSample> out;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (ok[c]) out.push_back(candidates[c]);
    }
    std::sort(out.begin(), out.end(), [](const FrontierSample& a, const FrontierSample& b) {
        return a.lap_index != b.lap_index ? a.lap_index < b.lap_index : a.row_index < b.row_index;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const FrontierSample& a, const FrontierSample& b) {
                              return a.lap_index == b.lap_index && a.row_index == b.row_index;
                          }),
              out.end());
    return out;
}

}  // namespace cstar
