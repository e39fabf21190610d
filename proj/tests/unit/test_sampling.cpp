#include <doctest.h>

#include <set>

#include "cstar/sampling.hpp"
#include "helpers.hpp"

using namespace cstar;
using namespace testutil;

namespace {

std::vector<int> cells_in(const GridGeometry& geo, Box b) {
    std::vector<int> out;
    for (int k = 0; k < geo.size(); ++k) {
        if (b.contains(geo.center(k))) out.push_back(k);
    }
    return out;
}

std::vector<int> free_cells(const KnownMap& map) {
    std::vector<int> out;
    for (int k = 0; k < map.geometry().size(); ++k) {
        if (map.at(k) == Cell::Free) out.push_back(k);
    }
    return out;
}

// Closed ball of radius w reaches an unknown, obstacle or out-of-bounds cell,
// and nothing hard lies within the clearance.
bool ball_oracle(const KnownMap& map, Point p, double w, double clearance) {
    const GridGeometry& geo = map.geometry();
    const double res = geo.resolution_m;
    bool touches = false;
    for (int j = -30; j < geo.ny + 30; ++j) {
        for (int i = -30; i < geo.nx + 30; ++i) {
            const Point lo{i * res, j * res};
            const double d = point_rect_distance(p, lo, {lo.x + res, lo.y + res});
            if (d > w + 1e-12) continue;
            const bool hard = !geo.in_bounds(i, j) || map.at(i, j) == Cell::Obstacle;
            if (hard && d <= clearance) return false;
            if (hard || map.at(i, j) == Cell::Unknown) touches = true;
        }
    }
    return touches;
}

}  // namespace

TEST_CASE("sampling front is new area minus sampled cells") {
    const Environment env = empty_room(20, 20);
    KnownMap map = fully_known(env);
    const GridGeometry& geo = env.geometry();
    const auto first = cells_in(geo, {{0, 0}, {10, 20}});
    const SamplingFront f0 = create_sampling_front(first, map, 0);
    CHECK(f0.cells == first);

    SUBCASE("re-entering sampled ground gives an empty front") {
        CHECK(create_sampling_front(first, map, 1).cells.empty());
    }
    SUBCASE("overlapping discovery keeps only the unsampled half") {
        const auto second = cells_in(geo, {{5, 0}, {15, 20}});
        const SamplingFront f1 = create_sampling_front(second, map, 1);
        std::vector<int> expect;
        for (int k : second) {
            if (geo.center(k).x >= 10.0) expect.push_back(k);
        }
        CHECK(f1.cells == expect);
    }
}

TEST_CASE("laps sit on the global lattice") {
    const Environment env = empty_room(20, 20);
    const GridGeometry& geo = env.geometry();
    const Lattice lat{{10.0, 10.0}, 1.0};
    SamplingFront front{cells_in(geo, {{10.0 - 2.4, 8.0}, {10.0 + 2.4, 12.0}}), 0};
    const auto laps = generate_laps(front, geo, lat);
    std::set<int> idx;
    for (const Lap& l : laps) {
        idx.insert(l.lap_index);
        CHECK(l.x == doctest::Approx(lat.lap_x(l.lap_index)));
    }
    CHECK(idx == std::set<int>{-2, -1, 0, 1, 2});
}

TEST_CASE("an obstacle across a lap splits it into two fragments") {
    const Environment env = env_from(R"({"width_m":20,"height_m":20,"obstacles":[{"rect":[8,9,5,2]}],"start":[0.5,0.5]})");
    KnownMap map = fully_known(env);
    const Lattice lat{{0.5, 0.5}, 1.0};
    const SamplingFront front = create_sampling_front(free_cells(map), map, 0);
    const auto laps = generate_laps(front, env.geometry(), lat);
    int fragments = 0;
    for (const Lap& l : laps) {
        if (l.lap_index != 10) continue;
        for (const LapSegment& s : l.segments) {
            ++fragments;
            CHECK((s.y_hi <= 9.0 + 1e-9 || s.y_lo >= 11.0 - 1e-9));
        }
    }
    CHECK(fragments == 2);
}

TEST_CASE("frontier samples") {
    SamplingParams params;
    SUBCASE("a lap far from anything unknown or solid yields nothing") {
        const Environment env = empty_room(50, 50);
        KnownMap map = fully_known(env);
        const Lattice lat{{0.5, 0.5}, 1.0};
        SamplingFront front{cells_in(env.geometry(), {{20, 20}, {30, 30}}), 0};
        const auto laps = generate_laps(front, env.geometry(), lat);
        CHECK_FALSE(laps.empty());
        CHECK(generate_frontier_samples(laps, map, lat, params).empty());
    }
    SUBCASE("the candidate next to an obstacle end qualifies") {
        const Environment env = env_from(R"({"width_m":20,"height_m":20,"obstacles":[{"rect":[0,10,20,2]}],"start":[0.5,0.5]})");
        KnownMap map = fully_known(env);
        const Lattice lat{{0.5, 0.5}, 1.0};
        SamplingFront front{cells_in(env.geometry(), {{4, 3}, {7, 10}}), 0};
        const auto samples = generate_frontier_samples(generate_laps(front, env.geometry(), lat), map, lat, params);
        for (double x : {4.5, 5.5, 6.5}) {
            bool found = false;
            for (const auto& s : samples) found = found || (s.position == Point{x, 9.5});
            CHECK(found);
        }
        for (const auto& s : samples) CHECK(s.position.y == doctest::Approx(9.5));
    }
    SUBCASE("a U pocket puts several samples on one lap") {
        const Environment env = env_from(
            R"({"width_m":20,"height_m":20,"obstacles":[{"rect":[6,6,8,1]},{"rect":[6,6,1,8]},{"rect":[13,6,1,8]}],"start":[0.5,0.5]})");
        KnownMap map = fully_known(env);
        const Lattice lat{{0.5, 0.5}, 1.0};
        const SamplingFront front = create_sampling_front(free_cells(map), map, 0);
        const auto samples = generate_frontier_samples(generate_laps(front, env.geometry(), lat), map, lat, params);
        int on_lap = 0;
        for (const auto& s : samples) on_lap += s.lap_index == 9 ? 1 : 0;
        CHECK(on_lap >= 3);
    }
}

TEST_CASE("emitted samples are exactly the lattice points passing the ball test") {
    const Environment env = env_from(
        R"({"width_m":30,"height_m":30,"obstacles":[{"rect":[8,4,3,6]},{"poly":[[15,15],[20,14],[18,20]]},{"rect":[3,18,9,1]}],"start":[0.5,0.5]})");
    KnownMap map(env.geometry());
    const auto fresh = integrate_scan(map, sense(env, {5.5, 12.5, 0.0}, SensorConfig{}));
    std::vector<int> new_free;
    for (int k : fresh) {
        if (map.at(k) == Cell::Free) new_free.push_back(k);
    }
    const Lattice lat{{0.5, 0.5}, 1.0};
    SamplingParams params;
    const SamplingFront front = create_sampling_front(new_free, map, 0);
    const auto laps = generate_laps(front, env.geometry(), lat);
    const auto samples = generate_frontier_samples(laps, map, lat, params);
    const auto serial = generate_frontier_samples(laps, map, lat, params, false);
    REQUIRE(samples.size() == serial.size());
    CHECK_FALSE(samples.empty());

    std::set<std::pair<int, int>> emitted;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        CHECK(s.position == serial[k].position);
        CHECK(s.position == lat.at(s.lap_index, s.row_index));
        CHECK(ball_oracle(map, s.position, 1.0, params.clearance));
        emitted.insert({s.lap_index, s.row_index});
    }
    CHECK(emitted.size() == samples.size());

    std::set<int> front_cells(front.cells.begin(), front.cells.end());
    for (int lap = 0; lap < 30; ++lap) {
        for (int row = 0; row < 30; ++row) {
            const Point p = lat.at(lap, row);
            if (!front_cells.count(env.geometry().cell_of(p))) continue;
            if (ball_oracle(map, p, 1.0, params.clearance)) CHECK(emitted.count({lap, row}) == 1);
        }
    }
}
