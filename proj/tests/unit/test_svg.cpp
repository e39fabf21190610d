#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cstar/engine.hpp"
#include "cstar/svg.hpp"
#include "helpers.hpp"

using namespace cstar;
using namespace testutil;

TEST_CASE("mode colours") {
    CHECK(std::string(mode_colour("coverage")) == "#d62728");
    CHECK(std::string(mode_colour("escape")) == "#1f3fbf");
    CHECK(std::string(mode_colour("tsp")) == "#2ca02c");
    CHECK(std::string(mode_colour("nonsense")) == "#888888");
}

// Set CSTAR_UPDATE_GOLDEN=1 to rewrite the reference picture.
TEST_CASE("rendering a fixed run matches the stored picture") {
    const Scenario sc = load_scenario(fixture_path("room20.json"));
    const Environment env = rasterize(sc);
    TraceLog trace;
    run_episode(env, sc.start, {}, &trace);
    const std::string svg = render_svg(sc, trace.lines());
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("#d62728") != std::string::npos);

    const std::string path = std::string(CSTAR_GOLDEN_DIR) + "/room20.svg";
    if (std::getenv("CSTAR_UPDATE_GOLDEN")) {
        std::ofstream(path) << svg;
    }
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == svg);
}
