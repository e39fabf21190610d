#include <doctest.h>

#include <set>

#include "cstar/engine.hpp"
#include "helpers.hpp"

using namespace cstar;
using namespace testutil;

TEST_CASE("trajectory metrics") {
    const Environment env = empty_room(20, 20);
    const std::vector<std::uint8_t> none(env.geometry().size(), 0);
    SUBCASE("straight 10 m") {
        const Metrics m = compute_metrics({{1, 1}, {11, 1}}, env, none, 0.5);
        CHECK(m.NT == 0);
        CHECK(m.TL == doctest::Approx(10.0));
        CHECK(m.CT == doctest::Approx(20.0));
    }
    SUBCASE("one right angle") {
        const Metrics m = compute_metrics({{1, 1}, {5, 1}, {5, 5}}, env, none, 0.5);
        CHECK(m.NT == 1);
        CHECK(m.CT == doctest::Approx(16.0 + 1.0));
    }
    SUBCASE("S-shape with 270 degrees of turning") {
        const Metrics m = compute_metrics({{1, 1}, {5, 1}, {5, 3}, {1, 3}, {1, 5}}, env, none, 0.5);
        CHECK(m.NT == 3);
    }
    SUBCASE("collinear points do not count as turns") {
        CHECK(compute_metrics({{1, 1}, {3, 1}, {3, 1}, {7, 1}}, env, none, 0.5).NT == 0);
    }
}

TEST_CASE("coverage ratio and overlap on the 1 m grid") {
    const Environment env = empty_room(10, 10);
    std::vector<std::uint8_t> covered(env.geometry().size(), 0);
    CHECK(coverage_ratio(env, covered) == doctest::Approx(0.0));
    for (int j = 0; j < 50; ++j) {
        for (int i = 0; i < 100; ++i) covered[env.geometry().index(i, j)] = 1;
    }
    CHECK(coverage_ratio(env, covered) == doctest::Approx(50.0));
    CHECK(coverage_ratio(env, covered, 1.0, false) == doctest::Approx(50.0));

    // Out along y = 0.5 and back along y = 0.5: every cell on the row is entered twice.
    CHECK(overlap_rate(env, {{0.5, 0.5}, {9.5, 0.5}, {9.5, 1.5}, {0.5, 1.5}}) == doctest::Approx(0.0));
    CHECK(overlap_rate(env, {{0.5, 0.5}, {9.5, 0.5}, {9.5, 1.5}, {9.5, 0.5}}) == doctest::Approx(1.0));
}

TEST_CASE("quartiles") {
    CHECK(quantile({1, 2, 3, 4, 5}, 0.5) == doctest::Approx(3.0));
    CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
    CHECK(quantile({1, 2, 3, 4, 5}, 0.25) == doctest::Approx(2.0));
    CHECK(quantile({7}, 0.75) == doctest::Approx(7.0));
}

TEST_CASE("empty room is swept lap by lap") {
    const Environment env = empty_room(10, 10);
    EpisodeConfig cfg;
    cfg.check_invariants = true;
    const EpisodeRecord rec = run_episode(env, {0.5, 0.5}, cfg);
    REQUIRE(rec.completed);
    CHECK(rec.invariant_violations.empty());
    const RobotRecord& r = rec.robots.front();
    CHECK(r.dead_ends == 0);
    CHECK(r.escapes == 0);
    CHECK(r.holes == 0);
    CHECK(coverage_ratio(env, rec.covered) == doctest::Approx(100.0));
    const Metrics m = compute_metrics(r.trajectory, env, rec.covered, cfg.speed);
    CHECK(m.TL == doctest::Approx(10 * 9.0 + 9 * 1.0));
    CHECK(m.NT == 18);
    CHECK(m.OR == doctest::Approx(0.0));
    for (std::size_t k = 1; k < r.trajectory.size(); ++k) {
        const Point a = r.trajectory[k - 1], b = r.trajectory[k];
        CHECK((a.x == doctest::Approx(b.x) || a.y == doctest::Approx(b.y)));
    }
}

TEST_CASE("a corridor narrower than a lap spacing is a single lap") {
    const Environment env = empty_room(1, 6);
    const EpisodeRecord rec = run_episode(env, {0.5, 0.5}, {});
    REQUIRE(rec.completed);
    for (Point p : rec.robots.front().trajectory) CHECK(p.x == doctest::Approx(0.5));
    CHECK(coverage_ratio(env, rec.covered) == doctest::Approx(100.0));
}

TEST_CASE("same seed, same trace") {
    const Scenario sc = load_scenario(fixture_path("room20.json"));
    const Environment env = rasterize(sc);
    EpisodeConfig cfg;
    cfg.seed = 17;
    TraceLog t1(TraceLevel::Debug), t2(TraceLevel::Debug);
    const EpisodeRecord a = run_episode(env, sc.start, cfg, &t1);
    const EpisodeRecord b = run_episode(env, sc.start, cfg, &t2);
    CHECK(t1.str() == t2.str());
    CHECK(a.robots.front().trajectory.size() == b.robots.front().trajectory.size());
}

TEST_CASE("episode properties on a cluttered room") {
    const Scenario sc = load_scenario(fixture_path("room20.json"));
    const Environment env = rasterize(sc);
    EpisodeConfig cfg;
    cfg.check_invariants = true;
    Coordinator c(env, cfg, {sc.start});
    c.initialize();
    RobotState& r = c.robots().front();
    double last_cov = 0.0;
    int last_unknown = c.map().unknown_count();
    while (c.tick(r)) {
        const double cov = coverage_ratio(env, c.coverage().data());
        CHECK(cov >= last_cov);
        last_cov = cov;
        CHECK(c.map().unknown_count() <= last_unknown);
        last_unknown = c.map().unknown_count();
        for (int id : r.retreat) CHECK(c.graph().state(id) == NodeState::Open);
    }
    const EpisodeRecord rec = finalize_episode(c, nullptr);
    REQUIRE(rec.completed);
    CHECK(rec.invariant_violations.empty());
    CHECK(last_cov == doctest::Approx(100.0));

    // Labels in the map agree with ground truth.
    for (int k = 0; k < env.geometry().size(); ++k) {
        if (c.map().at(k) == Cell::Free) CHECK_FALSE(env.blocked(k));
        if (c.map().at(k) == Cell::Obstacle) CHECK(env.blocked(k));
    }

    // Trajectory is continuous and its timestamps increase.
    const RobotRecord& rr = rec.robots.front();
    for (std::size_t k = 1; k < rr.times.size(); ++k) CHECK(rr.times[k] >= rr.times[k - 1]);
    for (std::size_t k = 1; k < rr.segments.size(); ++k) CHECK(rr.segments[k].a == rr.segments[k - 1].b);

    // Plain goal picks never repeat between escapes and tours.
    std::size_t from = 0;
    std::vector<int> breaks = rr.phase_breaks;
    breaks.push_back(static_cast<int>(rr.goal_nodes.size()));
    for (int b : breaks) {
        std::set<int> phase(rr.goal_nodes.begin() + from, rr.goal_nodes.begin() + b);
        CHECK(phase.size() == b - from);
        from = b;
    }
}

TEST_CASE("configuration checks") {
    EpisodeConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.speed = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = EpisodeConfig{};
    cfg.w = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("Monte Carlo: noiseless level is perfect and parallel equals serial") {
    const Environment env = empty_room(8, 8);
    MonteCarloConfig mc;
    mc.sigma_loc = {0.0, 0.05};
    mc.runs = 2;
    const auto par = run_monte_carlo(env, {0.5, 0.5}, {}, mc);
    const auto ser = run_monte_carlo_serial(env, {0.5, 0.5}, {}, mc);
    REQUIRE(par.size() == 2);
    REQUIRE(ser.size() == 2);
    for (double v : par[0].values) CHECK(v == doctest::Approx(100.0));
    for (std::size_t k = 0; k < par.size(); ++k) {
        CHECK(par[k].values == ser[k].values);
        CHECK(par[k].median == ser[k].median);
        CHECK(par[k].min <= par[k].q1);
        CHECK(par[k].q1 <= par[k].median);
        CHECK(par[k].median <= par[k].q3);
        CHECK(par[k].q3 <= par[k].max);
    }
}
