#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cstar/planner.hpp"
#include "helpers.hpp"

using namespace cstar;
using namespace testutil;

namespace {

const Lattice kLat{{0.5, 0.5}, 1.0};

int add(RcgGraph& g, int lap, int row) { return g.add_node(kLat.at(lap, row), lap, row); }

// Exhaustive optimum over every admissible visiting order.
double brute_force(const TspInstance& inst) {
    const int n = static_cast<int>(inst.cost.size());
    std::vector<int> middle;
    for (int v = 0; v < n; ++v) {
        if (v != inst.start && v != inst.end) middle.push_back(v);
    }
    double best = INFINITY;
    do {
        std::vector<int> order{inst.start};
        order.insert(order.end(), middle.begin(), middle.end());
        if (inst.end >= 0) order.push_back(inst.end);
        double c = 0.0;
        for (std::size_t k = 1; k < order.size(); ++k) c += inst.cost[order[k - 1]][order[k]];
        best = std::min(best, c);
    } while (std::next_permutation(middle.begin(), middle.end()));
    return best;
}

TspInstance random_instance(std::mt19937_64& rng, int n, int end_mode) {
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<Point> p(n);
    for (Point& q : p) q = {u(rng), u(rng)};
    TspInstance inst;
    inst.cost.assign(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) inst.cost[a][b] = distance(p[a], p[b]);
    }
    inst.start = 0;
    inst.end = end_mode == 0 ? 0 : end_mode == 1 ? n - 1 : -1;
    return inst;
}

}  // namespace

TEST_CASE("goal selection follows left, up, down, right") {
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 5);
    const int left = add(g, 4, 5), up = add(g, 5, 6), down = add(g, 5, 4), right = add(g, 6, 5);
    for (int m : {left, up, down, right}) g.add_edge(c, m);
    Rng rng(0);
    std::set<int> retreat;

    CHECK(select_goal_node(g, c, retreat, rng).node == left);
    g.set_state(left, NodeState::Closed);
    GoalChoice gc = select_goal_node(g, c, retreat, rng);
    CHECK(gc.node == up);
    CHECK(gc.direction == Direction::Up);
    g.set_state(up, NodeState::Closed);
    CHECK(select_goal_node(g, c, retreat, rng).node == down);
    g.set_state(down, NodeState::Closed);
    CHECK(select_goal_node(g, c, retreat, rng).node == right);
    g.set_state(right, NodeState::Closed);
    CHECK(select_goal_node(g, c, retreat, rng).kind == GoalKind::Complete);

    const int far = add(g, 9, 9);
    retreat.insert(far);
    CHECK(select_goal_node(g, c, retreat, rng).kind == GoalKind::DeadEnd);
}

TEST_CASE("several open nodes on the chosen side are picked from the seeded stream") {
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 5);
    const std::vector<int> side{add(g, 4, 4), add(g, 4, 5), add(g, 4, 6)};
    for (int m : side) g.add_edge(c, m);
    std::set<int> seen;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng a(seed), b(seed);
        const int pa = select_goal_node(g, c, {}, a).node;
        CHECK(pa == select_goal_node(g, c, {}, b).node);
        CHECK(std::find(side.begin(), side.end(), pa) != side.end());
        seen.insert(pa);
    }
    CHECK(seen.size() == 3);
}

TEST_CASE("state update") {
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 5);
    const int up = add(g, 5, 6), down = add(g, 5, 4), left = add(g, 4, 5), right = add(g, 6, 5);
    for (int m : {up, down, left, right}) g.add_edge(c, m);

    SUBCASE("both lap neighbours open keeps the node open") {
        const StateUpdate s = update_state(g, c, {GoalKind::Node, left, Direction::Left});
        CHECK_FALSE(s.closed);
        CHECK(g.state(c) == NodeState::Open);
    }
    SUBCASE("closed above and heading right closes without links") {
        g.set_state(up, NodeState::Closed);
        const StateUpdate s = update_state(g, c, {GoalKind::Node, right, Direction::Right});
        CHECK(s.closed);
        CHECK(s.links.empty());
        CHECK(g.state(c) == NodeState::Closed);
    }
    SUBCASE("neighbour one step away needs no link") {
        g.set_state(down, NodeState::Closed);
        const StateUpdate s = update_state(g, c, {GoalKind::Node, left, Direction::Left});
        CHECK(s.closed);
        CHECK(s.links.empty());
    }
}

TEST_CASE("heading left past a far open neighbour leaves a link node") {
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 2);
    const int far = add(g, 5, 5);  // three steps up
    const int left = add(g, 4, 2);
    g.add_edge(c, far);
    g.add_edge(c, left);
    const StateUpdate s = update_state(g, c, {GoalKind::Node, left, Direction::Left});
    CHECK(s.closed);
    REQUIRE(s.links.size() == 1);
    const int link = s.links[0];
    CHECK(g.position(link) == kLat.at(5, 3));
    CHECK(g.state(link) == NodeState::Open);
    CHECK(g.has_edge(link, far));
}

TEST_CASE("retreat set") {
    RcgGraph g(kLat, RcgGeometry{});
    const int a = add(g, 6, 6);  // exactly sqrt(2) w from (5.5, 5.5)
    const int b = add(g, 7, 5);  // 2 w away
    const int c = add(g, 5, 4);
    std::set<int> retreat;
    update_retreat_set(g, retreat, kLat.at(5, 5), -1);
    CHECK(retreat == std::set<int>{a, c});
    g.set_state(a, NodeState::Closed);
    update_retreat_set(g, retreat, kLat.at(5, 5), -1);
    CHECK(retreat == std::set<int>{c});
    update_retreat_set(g, retreat, kLat.at(7, 6), c);
    CHECK(retreat == std::set<int>{b, c});
}

TEST_CASE("dead-end escape") {
    SUBCASE("nearest of two by path length") {
        RcgGraph g(kLat, RcgGeometry{});
        const int c = g.add_node({0, 0}, 0, 0);
        const int a = g.add_node({7.2, 0}, 7, 0);
        const int b = g.add_node({0, 9.1}, 0, 9);
        g.add_edge(c, a);
        g.add_edge(c, b);
        const EscapePlan p = escape_dead_end(g, c, {a, b});
        CHECK(p.goal == a);
        CHECK(p.cost == doctest::Approx(7.2));
        CHECK(p.path == std::vector<int>{c, a});
    }
    SUBCASE("a chain is walked end to end") {
        RcgGraph g(kLat, RcgGeometry{});
        std::vector<int> chain;
        for (int k = 0; k < 5; ++k) {
            chain.push_back(add(g, k, k % 2));
            if (k) g.add_edge(chain[k - 1], chain[k]);
        }
        const EscapePlan p = escape_dead_end(g, chain.front(), {chain.back()});
        CHECK(p.path == chain);
        CHECK(p.cost == doctest::Approx(4 * std::sqrt(2.0)));
    }
    SUBCASE("random graphs match an exhaustive oracle") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 100; ++trial) {
            RcgGraph g(kLat, RcgGeometry{});
            std::bernoulli_distribution keep(0.7), link(0.6);
            for (int lap = 0; lap < 8; ++lap) {
                for (int row = 0; row < 8; ++row) {
                    if (keep(rng)) add(g, lap, row);
                }
            }
            for (int id = 0; id < g.size(); ++id) {
                const RcgNode n = g.node(id);
                for (auto [dl, dr] : {std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) {
                    const int m = g.node_at(n.lap + dl, n.row + dr);
                    if (m >= 0 && link(rng)) g.add_edge(id, m);
                }
            }
            const int current = 0;
            const auto dist = reference_distances(g, current);
            std::set<int> retreat;
            std::bernoulli_distribution pick(0.15);
            for (int id = 1; id < g.size(); ++id) {
                if (std::isfinite(dist[id]) && pick(rng)) retreat.insert(id);
            }
            if (retreat.empty()) continue;
            int best = -1;
            for (int id : retreat) {
                if (best < 0 || dist[id] < dist[best] - 1e-12) best = id;
            }
            const EscapePlan p = escape_dead_end(g, current, retreat);
            CHECK(p.cost == doctest::Approx(dist[best]).epsilon(1e-9));
            CHECK(dist[p.goal] == doctest::Approx(dist[best]).epsilon(1e-9));
            double walked = 0.0;
            for (std::size_t k = 1; k < p.path.size(); ++k) {
                CHECK(g.has_edge(p.path[k - 1], p.path[k]));
                walked += distance(g.position(p.path[k - 1]), g.position(p.path[k]));
            }
            CHECK(walked == doctest::Approx(p.cost).epsilon(1e-9));
        }
    }
}

TEST_CASE("coverage holes") {
    const Environment env = empty_room(20, 20);
    KnownMap map = fully_known(env);
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 5);
    const int goal = add(g, 4, 5);
    const int p1 = add(g, 6, 5), p2 = add(g, 7, 5), p3 = add(g, 7, 4);
    const int wall = add(g, 8, 5);
    g.add_edge(c, goal);
    g.add_edge(c, p1);
    g.add_edge(p1, p2);
    g.add_edge(p2, p3);
    g.add_edge(p2, wall);
    g.set_state(wall, NodeState::Closed);
    HoleParams params;

    SUBCASE("a walled pocket is one hole") {
        const auto holes = detect_coverage_holes(g, c, goal, map, params);
        REQUIRE(holes.size() == 1);
        CHECK(holes[0].label == 1);
        CHECK(holes[0].nodes == std::vector<int>{p1, p2, p3});
    }
    SUBCASE("two pockets get two labels") {
        const int q1 = add(g, 5, 6), q2 = add(g, 5, 7);
        g.add_edge(c, q1);
        g.add_edge(q1, q2);
        const auto holes = detect_coverage_holes(g, c, goal, map, params);
        REQUIRE(holes.size() == 2);
        CHECK(holes[0].label == 1);
        CHECK(holes[1].label == 2);
        std::vector<int> all = holes[0].nodes;
        all.insert(all.end(), holes[1].nodes.begin(), holes[1].nodes.end());
        std::sort(all.begin(), all.end());
        CHECK(all == std::vector<int>{p1, p2, p3, q1, q2});
    }
    SUBCASE("a pocket open to unknown space is no hole") {
        map.raw_cells()[env.geometry().index(75, 35)] = static_cast<std::uint8_t>(Cell::Unknown);
        CHECK(detect_coverage_holes(g, c, goal, map, params).empty());
    }
}

TEST_CASE("tour through a one-node hole ends at the goal") {
    const Environment env = empty_room(20, 20);
    const KnownMap map = fully_known(env);
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 5);
    const int goal = add(g, 4, 5);
    const int onward = add(g, 3, 5);
    const int hole = add(g, 6, 5);
    g.add_edge(c, goal);
    g.add_edge(goal, onward);
    g.add_edge(c, hole);
    CoverageHole h{1, {hole}, {}};
    const TspPlan plan = compute_tsp_trajectory({h}, c, goal, g, map);
    CHECK(plan.end_rule == TourEnd::Goal);
    std::vector<int> stops;
    for (const TourWaypoint& w : plan.waypoints) {
        if (w.stop) stops.push_back(w.node);
    }
    CHECK(stops == std::vector<int>{c, hole, goal});
    CHECK(plan.cost == doctest::Approx(3.0));
}

TEST_CASE("tour returns to the start when only the start has somewhere to go") {
    const Environment env = empty_room(20, 20);
    const KnownMap map = fully_known(env);
    RcgGraph g(kLat, RcgGeometry{});
    const int c = add(g, 5, 5);
    const int goal = add(g, 5, 6);
    const int side = add(g, 4, 5);
    const int h1 = add(g, 6, 5), h2 = add(g, 7, 5);
    g.add_edge(c, goal);
    g.add_edge(c, side);
    g.add_edge(c, h1);
    g.add_edge(h1, h2);
    CoverageHole h{1, {h1, h2}, {}};
    const TspPlan plan = compute_tsp_trajectory({h}, c, goal, g, map);
    CHECK(plan.end_rule == TourEnd::Start);
    REQUIRE(plan.waypoints.size() >= 2);
    CHECK(plan.waypoints.front().position == g.position(c));
    CHECK(plan.waypoints.back().position == g.position(c));
    CHECK(plan.cost == doctest::Approx(4.0));
}

TEST_CASE("tour solver against brute force") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 7;  // 2..8 stops
        const TspInstance inst = random_instance(rng, n, trial % 3);
        const TspResult r = solve_tsp(inst);
        const double opt = brute_force(inst);
        CHECK(r.cost == doctest::Approx(path_cost(inst, r.order)));
        CHECK(r.cost >= opt - 1e-9);
        if (n <= 4) CHECK(r.cost == doctest::Approx(opt));
        CHECK(r.cost <= 1.05 * opt + 1e-9);
        CHECK(r.order.front() == inst.start);
        if (inst.end >= 0) CHECK(r.order.back() == inst.end);
        std::vector<int> seen = r.order;
        if (inst.end == inst.start) seen.pop_back();
        std::sort(seen.begin(), seen.end());
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        CHECK(seen == all);
    }
}

TEST_CASE("2-opt only ever shortens the tour") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const TspInstance inst = random_instance(rng, 12, trial % 3);
        TspOptions opt;
        opt.multi_start = false;
        const TspResult r = solve_tsp(inst, opt);
        REQUIRE_FALSE(r.history.empty());
        CHECK(r.history.front() == doctest::Approx(r.construction_cost));
        for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k] < r.history[k - 1]);
        CHECK(r.cost <= r.construction_cost + 1e-9);
    }
}
