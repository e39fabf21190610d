#include <doctest.h>

#include <random>

#include "cstar/missions.hpp"
#include "helpers.hpp"

using namespace cstar;
using namespace testutil;

namespace {

const Lattice kLat{{0.5, 0.5}, 1.0};

std::vector<TrajectorySegment> cycle_path(const CycleRecord& c) {
    std::vector<TrajectorySegment> all = c.advance;
    all.insert(all.end(), c.coverage.begin(), c.coverage.end());
    all.insert(all.end(), c.retreat.begin(), c.retreat.end());
    return all;
}

}  // namespace

TEST_CASE("energy rule arithmetic") {
    CHECK(energy_allows(10, 4, 5));
    CHECK_FALSE(energy_allows(10, 4, 7));
    CHECK(energy_allows(10, 4, 6));
}

TEST_CASE("energy guard on a line of nodes") {
    RcgGraph g(kLat, RcgGeometry{});
    const int station = g.add_node({0, 0}, 0, 0);
    const int a = g.add_node({3, 0}, 3, 0);
    const int b = g.add_node({6, 0}, 6, 0);
    g.add_edge(station, a);
    g.add_edge(a, b);

    GuardDecision d = energy_step_guard(g, a, b, 3.0, 10.0, station, 1.0);
    CHECK(d.action == GuardAction::Proceed);
    CHECK(d.return_cost == doctest::Approx(6.0));
    CHECK(d.current_return_cost == doctest::Approx(3.0));

    d = energy_step_guard(g, a, b, 3.0, 8.0, station, 1.0);
    CHECK(d.action == GuardAction::Retreat);
    CHECK(d.retreat_path == std::vector<int>{a, station});

    d = energy_step_guard(g, a, b, 3.0, 10.0, station, 2.0);
    CHECK(d.action == GuardAction::Retreat);

    CHECK_THROWS_AS(energy_step_guard(g, a, b, 3.0, 2.0, station, 1.0), InfeasibleMission);
}

TEST_CASE("after charging the nearest open node is next") {
    SUBCASE("single open node") {
        RcgGraph g(kLat, RcgGeometry{});
        const int s = g.add_node({0, 0}, 0, 0);
        const int a = g.add_node({5, 0}, 5, 0);
        g.add_edge(s, a);
        g.set_state(s, NodeState::Closed);
        CHECK(resume_after_charge(g, s).goal == a);
    }
    SUBCASE("12.0 beats 15.5") {
        RcgGraph g(kLat, RcgGeometry{});
        const int s = g.add_node({0, 0}, 0, 0);
        const int a = g.add_node({12.0, 0}, 12, 0);
        const int b = g.add_node({0, 15.5}, 0, 15);
        g.add_edge(s, a);
        g.add_edge(s, b);
        g.set_state(s, NodeState::Closed);
        const EscapePlan p = resume_after_charge(g, s);
        CHECK(p.goal == a);
        CHECK(p.cost == doctest::Approx(12.0));
    }
    SUBCASE("nothing open means nothing to do") {
        RcgGraph g(kLat, RcgGeometry{});
        const int s = g.add_node({0, 0}, 0, 0);
        g.set_state(s, NodeState::Closed);
        CHECK(resume_after_charge(g, s).goal == -1);
    }
    SUBCASE("random graphs match an exhaustive oracle") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 50; ++trial) {
            RcgGraph g(kLat, RcgGeometry{});
            std::uniform_real_distribution<double> u(0.0, 20.0);
            std::bernoulli_distribution closed(0.6);
            for (int k = 0; k < 30; ++k) g.add_node({u(rng), u(rng)}, k, 0);
            for (int k = 1; k < 30; ++k) {
                g.add_edge(k, std::uniform_int_distribution<int>(0, k - 1)(rng));
                if (k > 2) g.add_edge(k, std::uniform_int_distribution<int>(0, k - 1)(rng));
            }
            for (int k = 0; k < 30; ++k) {
                if (k == 0 || closed(rng)) g.set_state(k, NodeState::Closed);
            }
            const auto dist = reference_distances(g, 0);
            double best = INFINITY;
            for (int k = 1; k < 30; ++k) {
                if (g.state(k) == NodeState::Open) best = std::min(best, dist[k]);
            }
            const EscapePlan p = resume_after_charge(g, 0);
            if (!std::isfinite(best)) {
                CHECK(p.goal == -1);
                continue;
            }
            CHECK(p.cost == doctest::Approx(best).epsilon(1e-9));
            CHECK(dist[p.goal] == doctest::Approx(best).epsilon(1e-9));
        }
    }
}

TEST_CASE("energy mission on a small room") {
    const Scenario sc = load_scenario(fixture_path("room20.json"));
    const Environment env = rasterize(sc);
    EnergyConfig energy;
    energy.capacity = 120.0;
    const EnergyMissionRecord rec = run_energy_mission(env, sc.start, {}, energy);
    REQUIRE(rec.episode.completed);
    CHECK(rec.cycles.size() >= 2);
    CHECK(rec.safety_violations.empty());
    CHECK(rec.min_margin >= -1e-9);
    CHECK(coverage_ratio(env, rec.episode.covered) == doctest::Approx(100.0));
    for (const CycleRecord& c : rec.cycles) {
        const auto path = cycle_path(c);
        REQUIRE_FALSE(path.empty());
        CHECK(path.front().a == rec.station);
        CHECK(path.back().b == rec.station);
        for (std::size_t k = 1; k < path.size(); ++k) CHECK(path[k].a == path[k - 1].b);
        CHECK(c.energy_used <= energy.capacity + 1e-9);
        CHECK(c.energy_used == doctest::Approx(c.advance_len + c.coverage_len + c.retreat_len));
    }
}

TEST_CASE("a battery too small to get anywhere is infeasible") {
    const Scenario sc = load_scenario(fixture_path("room20.json"));
    const Environment env = rasterize(sc);
    EnergyConfig energy;
    energy.capacity = 3.0;
    bool failed = false;
    try {
        const EnergyMissionRecord rec = run_energy_mission(env, sc.start, {}, energy);
        failed = rec.infeasible;
    } catch (const InfeasibleMission&) {
        failed = true;
    }
    CHECK(failed);
}

TEST_CASE("fleet partition") {
    const Environment env = empty_room(50, 50);
    const FleetConfig f = grid_fleet(env, 4, 1.0);
    REQUIRE(f.robot_count() == 4);
    double area = 0.0;
    for (const Box& b : f.partition) area += (b.hi.x - b.lo.x) * (b.hi.y - b.lo.y);
    CHECK(area == doctest::Approx(2500.0));
    const std::vector<Point> corners{{0.5, 0.5}, {49.5, 0.5}, {0.5, 49.5}, {49.5, 49.5}};
    for (int k = 0; k < 4; ++k) {
        CHECK(f.starts[k] == corners[k]);
        CHECK(f.partition[k].contains(f.starts[k]));
    }
    CHECK_THROWS_AS(grid_fleet(env, 3, 1.0), std::invalid_argument);
}

TEST_CASE("fleet on a small room") {
    const Environment env = env_from(R"({"width_m":20,"height_m":20,"obstacles":[{"rect":[8,8,4,4]}],"start":[0.5,0.5]})");
    const FleetConfig f = grid_fleet(env, 4, 1.0);
    TraceLog trace;
    const FleetRecord rec = run_fleet(env, f, {}, &trace);
    for (const auto& r : rec.episode.robots) CHECK(r.complete);
    REQUIRE(rec.episode.completed);
    CHECK(coverage_ratio(env, rec.episode.covered) == doctest::Approx(100.0));
    for (double c : rec.region_coverage) CHECK(c == doctest::Approx(100.0));

    // Every goal a robot picked lies in its own region (lower index on seams).
    for (const std::string& line : trace.lines()) {
        const auto j = nlohmann::json::parse(line);
        if (j["kind"] != "goal") continue;
        const Point at{j["at"][0].get<double>(), j["at"][1].get<double>()};
        int owner = -1;
        for (int k = 0; k < 4 && owner < 0; ++k) {
            if (f.partition[k].contains_closed(at)) owner = k;
        }
        CHECK(j["robot"].get<int>() == owner);
    }
}
