#include "cstar/svg.hpp"

#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

namespace cstar {

const char* mode_colour(const std::string& mode) {
    static const std::map<std::string, const char*> palette{
        {"coverage", "#d62728"}, {"escape", "#1f3fbf"}, {"tsp", "#2ca02c"},
        {"advance", "#d627c8"},  {"retreat", "#1f77b4"}};
    auto it = palette.find(mode);
    return it == palette.end() ? "#888888" : it->second;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string render_svg(const Scenario& sc, const std::vector<std::string>& trace_lines, const SvgStyle& style) {
    const double s = style.px_per_m;
    const double W = sc.width_m * s;
    const double H = sc.height_m * s;
    auto X = [&](double x) { return num(x * s); };
    auto Y = [&](double y) { return num(H - y * s); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(W) << "\" height=\"" << num(H)
      << "\" viewBox=\"0 0 " << num(W) << ' ' << num(H) << "\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << num(W) << "\" height=\"" << num(H)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"2\"/>\n";

    o << "<g id=\"obstacles\" fill=\"#444444\">\n";
    for (const RectObstacle& r : sc.rects) {
        o << "<rect x=\"" << X(r.x) << "\" y=\"" << Y(r.y + r.h) << "\" width=\"" << num(r.w * s) << "\" height=\""
          << num(r.h * s) << "\"/>\n";
    }
    for (const auto& poly : sc.polygons) {
        o << "<polygon points=\"";
        for (std::size_t k = 0; k < poly.size(); ++k) o << (k ? " " : "") << X(poly[k].x) << ',' << Y(poly[k].y);
        o << "\"/>\n";
    }
    o << "</g>\n";

    nlohmann::json graph;
    std::vector<nlohmann::json> moves;
    for (const std::string& line : trace_lines) {
        nlohmann::json ev = nlohmann::json::parse(line, nullptr, false);
        if (ev.is_discarded() || !ev.contains("kind")) continue;
        const std::string kind = ev["kind"];
        if (kind == "move") moves.push_back(std::move(ev));
        else if (kind == "done" && ev.contains("graph")) graph = ev["graph"];
    }

    if (style.draw_graph && graph.is_object()) {
        std::map<int, std::pair<double, double>> pos;
        for (const auto& n : graph["nodes"]) pos[n["id"].get<int>()] = {n["x"].get<double>(), n["y"].get<double>()};
        o << "<g id=\"graph\" stroke=\"#bbbbbb\" stroke-width=\"1\">\n";
        for (const auto& e : graph["edges"]) {
            const auto a = pos.at(e["a"].get<int>());
            const auto b = pos.at(e["b"].get<int>());
            o << "<line x1=\"" << X(a.first) << "\" y1=\"" << Y(a.second) << "\" x2=\"" << X(b.first) << "\" y2=\""
              << Y(b.second) << "\"/>\n";
        }
        for (const auto& n : graph["nodes"]) {
            const bool open = n["state"] == "open";
            o << "<circle cx=\"" << X(n["x"].get<double>()) << "\" cy=\"" << Y(n["y"].get<double>())
              << "\" r=\"2\" fill=\"" << (open ? "white" : "#999999") << "\"/>\n";
        }
        o << "</g>\n";
    }

    o << "<g id=\"trajectory\" stroke-width=\"2\" stroke-linecap=\"round\" fill=\"none\">\n";
    for (const auto& m : moves) {
        const auto& a = m["from"];
        const auto& b = m["to"];
        const std::string mode = m.value("mode", "coverage");
        o << "<line x1=\"" << X(a[0].get<double>()) << "\" y1=\"" << Y(a[1].get<double>()) << "\" x2=\""
          << X(b[0].get<double>()) << "\" y2=\"" << Y(b[1].get<double>()) << "\" stroke=\"" << mode_colour(mode)
          << '"' << (mode == "escape" ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    }
    o << "</g>\n</svg>\n";
    return o.str();
}

}  // namespace cstar
