#pragma once

#include <string>
#include <vector>

#include "cstar/scenario.hpp"

namespace cstar {

struct SvgStyle {
    double px_per_m{12.0};
    bool draw_graph{true};
};

/// Obstacles from the scenario, the final graph from the closing trace event
/// and every move event coloured by mode. Depends on nothing else.
std::string render_svg(const Scenario& sc, const std::vector<std::string>& trace_lines, const SvgStyle& style = {});

/// Stroke colour per motion mode; grey for anything unknown.
const char* mode_colour(const std::string& mode);

}  // namespace cstar
