#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cstar/geometry.hpp"
#include "cstar/world.hpp"

namespace cstar {

struct RectObstacle {
    double x{0.0};
    double y{0.0};
    double w{0.0};
    double h{0.0};
};

struct Scenario {
    std::string name;
    double width_m{50.0};
    double height_m{50.0};
    double resolution_m{0.1};
    std::vector<RectObstacle> rects;
    std::vector<std::vector<Point>> polygons;
    Point start{0.5, 0.5};
};

/// Malformed scenario text or schema. Line/column are 1-based and point at
/// the offending value.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& what, int line, int column)
        : std::runtime_error(what), line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& sc);

/// Cell is an obstacle when its centre lies inside any rectangle or polygon.
Environment rasterize(const Scenario& sc);

struct ValidationReport {
    bool feasible{true};
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};

ValidationReport validate_scenario(const Scenario& sc, const Environment& env, double w, double r_c);

}  // namespace cstar
