#include "cstar/scenario.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace cstar {
namespace {

using nlohmann::json;

void line_column(const std::string& text, std::size_t byte, int& line, int& col) {
    line = 1;
    col = 1;
    const std::size_t end = std::min(byte, text.size());
    for (std::size_t k = 0; k + 1 < end; ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
}

// Semantic problem at a JSON pointer; turned into a located ScenarioError.
struct SchemaError {
    std::string pointer;
    std::string message;
};

[[noreturn]] void fail(const std::string& where, const std::string& msg) { throw SchemaError{where, msg}; }

std::size_t skip_ws(const std::string& s, std::size_t i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return i;
}

std::size_t skip_string(const std::string& s, std::size_t i) {
    for (++i; i < s.size() && s[i] != '"'; ++i) {
        if (s[i] == '\\') ++i;
    }
    return i + 1;
}

std::size_t skip_value(const std::string& s, std::size_t i) {
    i = skip_ws(s, i);
    if (i >= s.size()) return i;
    if (s[i] == '"') return skip_string(s, i);
    if (s[i] == '{' || s[i] == '[') {
        int depth = 0;
        while (i < s.size()) {
            const char c = s[i];
            if (c == '"') {
                i = skip_string(s, i);
                continue;
            }
            if (c == '{' || c == '[') ++depth;
            if (c == '}' || c == ']') {
                if (--depth == 0) return i + 1;
            }
            ++i;
        }
        return i;
    }
    while (i < s.size() && s[i] != ',' && s[i] != '}' && s[i] != ']' && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return i;
}

// Offset of the value a JSON pointer names in already-valid text; stops at
// the deepest ancestor that exists.
std::size_t pointer_offset(const std::string& s, const std::string& pointer) {
    std::size_t pos = skip_ws(s, 0);
    std::size_t k = 0;
    while (k < pointer.size() && pointer[k] == '/') {
        const std::size_t next = pointer.find('/', k + 1);
        const std::string token = pointer.substr(k + 1, next == std::string::npos ? std::string::npos : next - k - 1);
        k = next == std::string::npos ? pointer.size() : next;
        if (pos >= s.size()) return pos;
        if (s[pos] == '{') {
            std::size_t i = skip_ws(s, pos + 1);
            bool found = false;
            while (i < s.size() && s[i] == '"') {
                const std::size_t end = skip_string(s, i);
                const std::string key = s.substr(i + 1, end - i - 2);
                i = skip_ws(s, end);
                if (i < s.size() && s[i] == ':') i = skip_ws(s, i + 1);
                if (key == token) {
                    pos = i;
                    found = true;
                    break;
                }
                i = skip_ws(s, skip_value(s, i));
                if (i < s.size() && s[i] == ',') i = skip_ws(s, i + 1);
            }
            if (!found) return pos;
        } else if (s[pos] == '[') {
            const long want = std::strtol(token.c_str(), nullptr, 10);
            std::size_t i = skip_ws(s, pos + 1);
            for (long n = 0; n < want && i < s.size() && s[i] != ']'; ++n) {
                i = skip_ws(s, skip_value(s, i));
                if (i < s.size() && s[i] == ',') i = skip_ws(s, i + 1);
            }
            if (i >= s.size() || s[i] == ']') return pos;
            pos = i;
        } else {
            return pos;
        }
    }
    return pos;
}

double number_at(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

Point point_at(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
    return {number_at(j[0], where + "/0"), number_at(j[1], where + "/1")};
}

Scenario parse_document(const json& doc, const std::string& name) {
    Scenario sc;
    sc.name = name;
    for (const char* key : {"width_m", "height_m", "start"}) {
        if (!doc.contains(key)) fail("", std::string("missing field '") + key + "'");
    }
    sc.width_m = number_at(doc["width_m"], "/width_m");
    sc.height_m = number_at(doc["height_m"], "/height_m");
    if (doc.contains("resolution_m")) sc.resolution_m = number_at(doc["resolution_m"], "/resolution_m");
    if (!(sc.width_m > 0.0)) fail("/width_m", "must be positive");
    if (!(sc.height_m > 0.0)) fail("/height_m", "must be positive");
    if (!(sc.resolution_m > 0.0)) fail("/resolution_m", "must be positive");
    sc.start = point_at(doc["start"], "/start");

    if (!doc.contains("obstacles")) return sc;
    const json& obs = doc["obstacles"];
    if (!obs.is_array()) fail("/obstacles", "expected an array");
    for (std::size_t k = 0; k < obs.size(); ++k) {
        const std::string where = "/obstacles/" + std::to_string(k);
        const json& o = obs[k];
        if (o.is_object() && o.contains("rect")) {
            const json& r = o["rect"];
            if (!r.is_array() || r.size() != 4) fail(where + "/rect", "expected [x, y, w, h]");
            RectObstacle rect{number_at(r[0], where + "/rect/0"), number_at(r[1], where + "/rect/1"),
                              number_at(r[2], where + "/rect/2"), number_at(r[3], where + "/rect/3")};
            if (!(rect.w > 0.0) || !(rect.h > 0.0)) fail(where + "/rect", "width and height must be positive");
            sc.rects.push_back(rect);
        } else if (o.is_object() && o.contains("poly")) {
            const json& p = o["poly"];
            if (!p.is_array() || p.size() < 3) fail(where + "/poly", "needs at least three vertices");
            std::vector<Point> poly;
            for (std::size_t v = 0; v < p.size(); ++v) {
                poly.push_back(point_at(p[v], where + "/poly/" + std::to_string(v)));
            }
            if (!polygon_is_simple(poly)) fail(where + "/poly", "polygon is not simple");
            sc.polygons.push_back(std::move(poly));
        } else {
            fail(where, "expected {\"rect\": ...} or {\"poly\": ...}");
        }
    }
    return sc;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        int line = 0;
        int col = 0;
        line_column(text, e.byte, line, col);
        throw ScenarioError("syntax error: " + std::string(e.what()), line, col);
    }
    if (!doc.is_object()) throw ScenarioError("top level must be an object", 1, 1);
    try {
        return parse_document(doc, name);
    } catch (const SchemaError& e) {
        int line = 0;
        int col = 0;
        line_column(text, pointer_offset(text, e.pointer) + 1, line, col);
        const std::string where = e.pointer.empty() ? "" : e.pointer + ": ";
        throw ScenarioError(where + e.message, line, col);
    }
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string name = path;
    const auto slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    const auto dot = name.rfind(".json");
    if (dot != std::string::npos) name = name.substr(0, dot);
    return parse_scenario(ss.str(), name);
}

std::string scenario_to_json(const Scenario& sc) {
    nlohmann::ordered_json doc;
    doc["width_m"] = sc.width_m;
    doc["height_m"] = sc.height_m;
    doc["resolution_m"] = sc.resolution_m;
    doc["obstacles"] = nlohmann::ordered_json::array();
    for (const RectObstacle& r : sc.rects) doc["obstacles"].push_back({{"rect", {r.x, r.y, r.w, r.h}}});
    for (const auto& poly : sc.polygons) {
        nlohmann::ordered_json pts = nlohmann::ordered_json::array();
        for (const Point& p : poly) pts.push_back({p.x, p.y});
        doc["obstacles"].push_back({{"poly", pts}});
    }
    doc["start"] = {sc.start.x, sc.start.y};
    return doc.dump(2);
}

Environment rasterize(const Scenario& sc) {
    const GridGeometry geo = GridGeometry::make(sc.width_m, sc.height_m, sc.resolution_m);
    std::vector<std::uint8_t> occ(geo.size(), 0);
    for (const RectObstacle& r : sc.rects) {
        const int i0 = std::max(0, static_cast<int>(std::floor(r.x / geo.resolution_m - 0.5)));
        const int i1 = std::min(geo.nx - 1, static_cast<int>(std::ceil((r.x + r.w) / geo.resolution_m)));
        const int j0 = std::max(0, static_cast<int>(std::floor(r.y / geo.resolution_m - 0.5)));
        const int j1 = std::min(geo.ny - 1, static_cast<int>(std::ceil((r.y + r.h) / geo.resolution_m)));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                const Point c = geo.center(i, j);
                if (c.x >= r.x && c.x < r.x + r.w && c.y >= r.y && c.y < r.y + r.h) occ[geo.index(i, j)] = 1;
            }
        }
    }
    for (const auto& poly : sc.polygons) {
        double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
        for (const Point& p : poly) {
            lo_x = std::min(lo_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_x = std::max(hi_x, p.x);
            hi_y = std::max(hi_y, p.y);
        }
        const int i0 = std::max(0, static_cast<int>(std::floor(lo_x / geo.resolution_m)));
        const int i1 = std::min(geo.nx - 1, static_cast<int>(std::ceil(hi_x / geo.resolution_m)));
        const int j0 = std::max(0, static_cast<int>(std::floor(lo_y / geo.resolution_m)));
        const int j1 = std::min(geo.ny - 1, static_cast<int>(std::ceil(hi_y / geo.resolution_m)));
        for (int j = j0; j <= j1; ++j) {
            for (int i = i0; i <= i1; ++i) {
                if (point_in_polygon(geo.center(i, j), poly)) occ[geo.index(i, j)] = 1;
            }
        }
    }
    return Environment(geo, std::move(occ));
}

ValidationReport validate_scenario(const Scenario& sc, const Environment& env, double w, double r_c) {
    ValidationReport rep;
    if (!env.geometry().contains(sc.start)) {
        rep.feasible = false;
        rep.errors.push_back("start lies outside the workspace");
    } else if (!env.is_free(sc.start)) {
        rep.feasible = false;
        rep.errors.push_back("start lies inside an obstacle");
    }
    if (!env.free_space_connected()) {
        rep.feasible = false;
        rep.errors.push_back("free space is not connected");
    }
    if (w > 2.0 * r_c + 1e-12) rep.warnings.push_back("completeness guarantee void (w > 2*r_c)");
    return rep;
}

}  // namespace cstar
