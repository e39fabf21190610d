#pragma once

#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "cstar/geometry.hpp"

// Shortest paths over any graph exposing size(), position(id) and
// for_each_neighbor(id, f(neighbor, cost)).
namespace cstar {

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct PathResult {
    double cost{kUnreachable};
    std::vector<int> nodes;  // start..goal, empty if unreachable
    bool found() const { return !nodes.empty(); }
};

/// Explicit weighted graph used for search over augmented node sets.
struct SearchGraph {
    std::vector<Point> positions;
    std::vector<std::vector<std::pair<int, double>>> adj;

    int size() const { return static_cast<int>(positions.size()); }
    Point position(int id) const { return positions[id]; }
    template <class F>
    void for_each_neighbor(int id, F&& f) const {
        for (const auto& [n, c] : adj[id]) f(n, c);
    }
    int add_node(Point p) {
        positions.push_back(p);
        adj.emplace_back();
        return size() - 1;
    }
    void add_edge(int a, int b, double cost) {
        adj[a].emplace_back(b, cost);
        adj[b].emplace_back(a, cost);
    }
};

namespace detail {

inline std::vector<int> unwind(const std::vector<int>& parent, int goal) {
    std::vector<int> path;
    for (int v = goal; v >= 0; v = parent[v]) path.push_back(v);
    return {path.rbegin(), path.rend()};
}

}  // namespace detail

/// A* with the Euclidean heuristic (admissible for Euclidean edge costs).
/// Ties on f are broken by node id so results are reproducible.
template <class G>
PathResult astar(const G& g, int start, int goal) {
    PathResult out;
    const int n = g.size();
    if (start < 0 || goal < 0 || start >= n || goal >= n) return out;
    std::vector<double> dist(n, kUnreachable);
    std::vector<int> parent(n, -1);
    std::vector<char> closed(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    const Point target = g.position(goal);
    dist[start] = 0.0;
    open.emplace(distance(g.position(start), target), start);
    while (!open.empty()) {
        const auto [f, v] = open.top();
        open.pop();
        if (closed[v]) continue;
        closed[v] = 1;
        if (v == goal) break;
        g.for_each_neighbor(v, [&](int m, double c) {
            const double nd = dist[v] + c;
            if (nd < dist[m]) {
                dist[m] = nd;
                parent[m] = v;
                open.emplace(nd + distance(g.position(m), target), m);
            }
        });
    }
    if (dist[goal] == kUnreachable) return out;
    out.cost = dist[goal];
    out.nodes = detail::unwind(parent, goal);
    return out;
}

struct ShortestPathTree {
    std::vector<double> dist;
    std::vector<int> parent;
    std::vector<int> path_to(int v) const {
        if (v < 0 || dist[v] == kUnreachable) return {};
        return detail::unwind(parent, v);
    }
};

/// Single-source Dijkstra; stops early once every id in `targets` is settled
/// (pass an empty list for the full tree).
template <class G>
ShortestPathTree dijkstra(const G& g, int source, const std::vector<int>& targets = {}) {
    const int n = g.size();
    ShortestPathTree t{std::vector<double>(n, kUnreachable), std::vector<int>(n, -1)};
    std::vector<char> settled(n, 0);
    std::vector<char> wanted(n, 0);
    int remaining = 0;
    for (int v : targets) {
        if (v >= 0 && v < n && !wanted[v]) {
            wanted[v] = 1;
            ++remaining;
        }
    }
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    t.dist[source] = 0.0;
    open.emplace(0.0, source);
    while (!open.empty()) {
        const auto [d, v] = open.top();
        open.pop();
        if (settled[v]) continue;
        settled[v] = 1;
        if (wanted[v] && --remaining == 0) break;
        g.for_each_neighbor(v, [&](int m, double c) {
            const double nd = d + c;
            if (nd < t.dist[m]) {
                t.dist[m] = nd;
                t.parent[m] = v;
                open.emplace(nd, m);
            }
        });
    }
    return t;
}

}  // namespace cstar
