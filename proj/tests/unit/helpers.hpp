#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "cstar/rcg.hpp"
#include "cstar/scenario.hpp"
#include "cstar/search.hpp"
#include "cstar/world.hpp"

namespace testutil {

using namespace cstar;

inline std::string fixture_path(const std::string& name) { return std::string(CSTAR_FIXTURE_DIR) + "/" + name; }

inline Environment env_from(const std::string& json_text) { return rasterize(parse_scenario(json_text)); }

inline Environment empty_room(double w, double h) {
    return env_from("{\"width_m\":" + std::to_string(w) + ",\"height_m\":" + std::to_string(h) +
                    ",\"start\":[0.5,0.5]}");
}

// Map with every cell labelled from ground truth.
inline KnownMap fully_known(const Environment& env) {
    KnownMap map(env.geometry());
    std::uint8_t* raw = map.raw_cells();
    std::vector<int> changed;
    for (int k = 0; k < env.geometry().size(); ++k) {
        raw[k] = static_cast<std::uint8_t>(env.blocked(k) ? Cell::Obstacle : Cell::Free);
        changed.push_back(k);
    }
    map.note_discovered(changed);
    return map;
}

// Plain textbook Dijkstra over the live edges of a graph, O(n^2), kept apart
// from the library's search code on purpose.
inline std::vector<double> reference_distances(const RcgGraph& g, int source) {
    const int n = g.size();
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    for (const RcgEdge& e : g.edges()) {
        const double c = distance(g.position(e.a), g.position(e.b));
        adj[e.a].push_back({e.b, c});
        adj[e.b].push_back({e.a, c});
    }
    std::vector<double> dist(n, INFINITY);
    std::vector<char> done(n, 0);
    dist[source] = 0.0;
    for (;;) {
        int best = -1;
        for (int v = 0; v < n; ++v) {
            if (!done[v] && std::isfinite(dist[v]) && (best < 0 || dist[v] < dist[best])) best = v;
        }
        if (best < 0) break;
        done[best] = 1;
        for (auto [m, c] : adj[best]) dist[m] = std::min(dist[m], dist[best] + c);
    }
    return dist;
}

}  // namespace testutil
