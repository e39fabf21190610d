#include "cstar/rcg.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "cstar/kernels.hpp"

namespace cstar {

// ---------------------------------------------------------------------------
// Map queries

bool edge_feasible(const KnownMap& map, Point a, Point b, double capsule_radius) {
    const GridGeometry& geo = map.geometry();
    const double res = geo.resolution_m;
    const double reach = capsule_radius + res * 0.7071067811865476;
    const int i0 = static_cast<int>(std::floor((std::min(a.x, b.x) - reach) / res));
    const int i1 = static_cast<int>(std::floor((std::max(a.x, b.x) + reach) / res));
    const int j0 = static_cast<int>(std::floor((std::min(a.y, b.y) - reach) / res));
    const int j1 = static_cast<int>(std::floor((std::max(a.y, b.y) + reach) / res));
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const bool inside = geo.in_bounds(i, j);
            if (inside && map.at(i, j) != Cell::Obstacle) continue;
            if (point_segment_distance(geo.center(i, j), a, b) <= reach) return false;
        }
    }
    bool ok = true;
    const double len = distance(a, b);
    if (len <= 0.0) return map.is_known_free(a);
    const double angle = std::atan2(b.y - a.y, b.x - a.x);
    kernels::traverse_ray(geo, a, angle, len, [&](int i, int j, double) {
        if (!geo.in_bounds(i, j) || map.at(i, j) != Cell::Free) {
            ok = false;
            return false;
        }
        return true;
    });
    return ok;
}

namespace {

bool hard_cell(const KnownMap& map, int i, int j) {
    const GridGeometry& geo = map.geometry();
    if (!geo.in_bounds(i, j)) return true;
    const Cell c = map.at(i, j);
    if (c == Cell::Obstacle) return true;
    return c == Cell::Unknown && map.is_frontier_unknown(i, j);
}

double nearest_hard(const KnownMap& map, Point p, double cap) {
    const GridGeometry& geo = map.geometry();
    const double res = geo.resolution_m;
    const int i0 = static_cast<int>(std::floor((p.x - cap) / res));
    const int i1 = static_cast<int>(std::floor((p.x + cap) / res));
    const int j0 = static_cast<int>(std::floor((p.y - cap) / res));
    const int j1 = static_cast<int>(std::floor((p.y + cap) / res));
    double best = cap;
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            const Point lo{i * res, j * res};
            const double d = point_rect_distance(p, lo, {lo.x + res, lo.y + res});
            if (d >= best) continue;
            if (hard_cell(map, i, j)) best = d;
        }
    }
    return best;
}

}  // namespace

double edge_clearance(const KnownMap& map, Point a, Point b, int points, double cap) {
    double best = cap;
    for (int s = 1; s <= points; ++s) {
        const double t = static_cast<double>(s) / (points + 1);
        best = std::min(best, nearest_hard(map, a + (b - a) * t, best));
    }
    return best;
}

bool ball_touches_unknown(const KnownMap& map, Point p, double r) {
    const GridGeometry& geo = map.geometry();
    const double res = geo.resolution_m;
    const int i0 = std::max(0, static_cast<int>(std::floor((p.x - r) / res)));
    const int i1 = std::min(geo.nx - 1, static_cast<int>(std::floor((p.x + r) / res)));
    const int j0 = std::max(0, static_cast<int>(std::floor((p.y - r) / res)));
    const int j1 = std::min(geo.ny - 1, static_cast<int>(std::floor((p.y + r) / res)));
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            if (map.at(i, j) != Cell::Unknown) continue;
            const Point lo{i * res, j * res};
            if (point_rect_distance(p, lo, {lo.x + res, lo.y + res}) > r) continue;
            if (map.is_frontier_unknown(i, j)) return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Graph storage

int RcgGraph::region_of(Point p) const {
    for (std::size_t q = 0; q < regions_.size(); ++q) {
        if (regions_[q].contains_closed(p)) return static_cast<int>(q);
    }
    return -1;
}

int RcgGraph::add_node(Point p, int lap, int row, bool is_link) {
    if (node_at(lap, row) >= 0) throw std::logic_error("lattice slot already occupied");
    RcgNode n;
    n.id = static_cast<int>(nodes_.size());
    n.position = p;
    n.lap = lap;
    n.row = row;
    n.is_link = is_link;
    n.region = region_of(p);
    nodes_.push_back(n);
    lap_rows_[lap][row] = n.id;
    ++alive_count_;
    ++open_count_;
    return n.id;
}

void RcgGraph::erase_node(int id) {
    RcgNode& n = nodes_[id];
    if (!n.alive) return;
    const std::vector<int> nbrs = n.adj;
    for (int m : nbrs) remove_edge(id, m);
    n.alive = false;
    --alive_count_;
    if (n.state == NodeState::Open) --open_count_;
    auto lap_it = lap_rows_.find(n.lap);
    if (lap_it != lap_rows_.end()) {
        lap_it->second.erase(n.row);
        if (lap_it->second.empty()) lap_rows_.erase(lap_it);
    }
}

int RcgGraph::node_at(int lap, int row) const {
    auto lap_it = lap_rows_.find(lap);
    if (lap_it == lap_rows_.end()) return -1;
    auto it = lap_it->second.find(row);
    return it == lap_it->second.end() ? -1 : it->second;
}

std::vector<int> RcgGraph::alive_ids() const {
    std::vector<int> out;
    out.reserve(alive_count_);
    for (const RcgNode& n : nodes_) {
        if (n.alive) out.push_back(n.id);
    }
    return out;
}

bool RcgGraph::has_edge(int a, int b) const {
    const auto& adj = nodes_[a].adj;
    return std::binary_search(adj.begin(), adj.end(), b);
}

void RcgGraph::add_edge(int a, int b) {
    if (a == b) throw std::logic_error("self loop");
    if (!alive(a) || !alive(b)) throw std::logic_error("edge on dead node");
    if (has_edge(a, b)) return;
    auto& aa = nodes_[a].adj;
    aa.insert(std::lower_bound(aa.begin(), aa.end(), b), b);
    auto& bb = nodes_[b].adj;
    bb.insert(std::lower_bound(bb.begin(), bb.end(), a), a);
    ++edge_count_;
}

void RcgGraph::remove_edge(int a, int b) {
    auto& aa = nodes_[a].adj;
    auto it = std::lower_bound(aa.begin(), aa.end(), b);
    if (it == aa.end() || *it != b) return;
    aa.erase(it);
    auto& bb = nodes_[b].adj;
    bb.erase(std::lower_bound(bb.begin(), bb.end(), a));
    --edge_count_;
}

std::vector<RcgEdge> RcgGraph::edges() const {
    std::vector<RcgEdge> out;
    for (const RcgNode& n : nodes_) {
        if (!n.alive) continue;
        for (int m : n.adj) {
            if (m > n.id) out.push_back({n.id, m, distance(n.position, nodes_[m].position)});
        }
    }
    return out;
}

int RcgGraph::up(int id) const {
    const RcgNode& n = nodes_[id];
    for (int m : n.adj) {
        if (nodes_[m].lap == n.lap && nodes_[m].row > n.row) return m;
    }
    return -1;
}

int RcgGraph::down(int id) const {
    const RcgNode& n = nodes_[id];
    for (int m : n.adj) {
        if (nodes_[m].lap == n.lap && nodes_[m].row < n.row) return m;
    }
    return -1;
}

std::vector<int> RcgGraph::side_neighbors(int id, int lap_offset) const {
    std::vector<int> out;
    const RcgNode& n = nodes_[id];
    for (int m : n.adj) {
        if (nodes_[m].lap == n.lap + lap_offset) out.push_back(m);
    }
    return out;
}

int RcgGraph::nearest_above(int id) const {
    const RcgNode& n = nodes_[id];
    const auto& rows = lap_rows_.at(n.lap);
    auto it = rows.upper_bound(n.row);
    if (it == rows.end() || nodes_[it->second].region != n.region) return -1;
    return it->second;
}

int RcgGraph::nearest_below(int id) const {
    const RcgNode& n = nodes_[id];
    const auto& rows = lap_rows_.at(n.lap);
    auto it = rows.lower_bound(n.row);
    if (it == rows.begin()) return -1;
    --it;
    if (nodes_[it->second].region != n.region) return -1;
    return it->second;
}

void RcgGraph::set_state(int id, NodeState s) {
    RcgNode& n = nodes_[id];
    if (n.state == s) return;
    if (s == NodeState::Open) throw std::logic_error("closed node cannot reopen");
    n.state = s;
    if (n.alive) --open_count_;
}

std::vector<int> RcgGraph::open_ids() const {
    std::vector<int> out;
    for (const RcgNode& n : nodes_) {
        if (n.alive && n.state == NodeState::Open) out.push_back(n.id);
    }
    return out;
}

int RcgGraph::create_link_node(int base, int direction) {
    const RcgNode b = nodes_[base];
    const int neighbor = direction > 0 ? up(base) : down(base);
    const int row = b.row + (direction > 0 ? 1 : -1);
    if (node_at(b.lap, row) >= 0) throw std::logic_error("link slot already occupied");
    const int id = add_node(lattice_.at(b.lap, row), b.lap, row, true);
    if (neighbor >= 0) {
        remove_edge(base, neighbor);
        add_edge(id, neighbor);
    }
    add_edge(base, id);
    return id;
}

bool RcgGraph::reaches_all(int from, const std::vector<int>& targets) const {
    std::unordered_set<int> pending;
    for (int t : targets) {
        if (t != from && alive(t)) pending.insert(t);
    }
    if (pending.empty()) return true;
    std::vector<std::uint8_t> seen(nodes_.size(), 0);
    std::deque<int> queue{from};
    seen[from] = 1;
    while (!queue.empty()) {
        const int n = queue.front();
        queue.pop_front();
        for (int m : nodes_[n].adj) {
            if (seen[m]) continue;
            seen[m] = 1;
            if (pending.erase(m) && pending.empty()) return true;
            queue.push_back(m);
        }
    }
    return false;
}

std::vector<std::uint8_t> RcgGraph::component_of(int from) const {
    std::vector<std::uint8_t> seen(nodes_.size(), 0);
    if (!alive(from)) return seen;
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        const int n = stack.back();
        stack.pop_back();
        for (int m : nodes_[n].adj) {
            if (!seen[m]) {
                seen[m] = 1;
                stack.push_back(m);
            }
        }
    }
    return seen;
}

std::string RcgGraph::to_json() const {
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const RcgNode& n : nodes_) {
        if (!n.alive) continue;
        doc["nodes"].push_back({{"id", n.id},
                                {"x", n.position.x},
                                {"y", n.position.y},
                                {"lap", n.lap},
                                {"state", n.state == NodeState::Open ? "open" : "closed"},
                                {"is_link", n.is_link}});
    }
    doc["edges"] = nlohmann::ordered_json::array();
    for (const RcgEdge& e : edges()) doc["edges"].push_back({{"a", e.a}, {"b", e.b}});
    return doc.dump();
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

struct Candidate {
    double length;
    int a;
    int b;
    bool operator<(const Candidate& o) const { return std::tie(length, a, b) < std::tie(o.length, o.a, o.b); }
};

bool crosses_strip_edge(const RcgGraph& g, int a, int b) {
    const RcgNode& na = g.node(a);
    const RcgNode& nb = g.node(b);
    const int lo_lap = std::min(na.lap, nb.lap);
    const int hi_lap = std::max(na.lap, nb.lap);
    const int r0 = std::min(na.row, nb.row) - 1;
    const int r1 = std::max(na.row, nb.row) + 1;
    for (int lap : {lo_lap, hi_lap}) {
        const int offset = lap == lo_lap ? 1 : -1;
        for (int r = r0; r <= r1; ++r) {
            const int n = g.node_at(lap, r);
            if (n < 0) continue;
            for (int m : g.side_neighbors(n, offset)) {
                if ((n == a && m == b) || (n == b && m == a)) continue;
                if (segments_conflict(na.position, nb.position, g.position(n), g.position(m))) return true;
            }
        }
    }
    return false;
}

void link_same_lap(RcgGraph& g, int id, const KnownMap& map) {
    const double radius = g.geom().capsule_radius;
    const int above = g.nearest_above(id);
    const int below = g.nearest_below(id);
    if (above >= 0 && below >= 0 && g.has_edge(above, below)) {
        g.remove_edge(above, below);
        g.add_edge(below, id);
        g.add_edge(id, above);
        return;
    }
    if (above >= 0 && g.up(id) < 0 && g.down(above) < 0 &&
        edge_feasible(map, g.position(id), g.position(above), radius)) {
        g.add_edge(id, above);
    }
    if (below >= 0 && g.down(id) < 0 && g.up(below) < 0 &&
        edge_feasible(map, g.position(id), g.position(below), radius)) {
        g.add_edge(id, below);
    }
}

void collect_cross(const RcgGraph& g, int id, std::vector<Candidate>& out) {
    const RcgNode& n = g.node(id);
    for (int dk : {-1, 1}) {
        for (int dj = -1; dj <= 1; ++dj) {
            const int m = g.node_at(n.lap + dk, n.row + dj);
            if (m < 0 || g.has_edge(id, m)) continue;
            out.push_back({distance(n.position, g.position(m)), std::min(id, m), std::max(id, m)});
        }
    }
}

}  // namespace

ExpandResult expand(RcgGraph& g, const std::vector<FrontierSample>& samples, const KnownMap& map,
                    const std::vector<int>& revisit, const std::vector<int>& anchors) {
    ExpandResult res;
    const int edges_before = g.edge_count();
    for (const FrontierSample& s : samples) {
        if (g.node_at(s.lap_index, s.row_index) >= 0) continue;
        res.new_nodes.push_back(g.add_node(s.position, s.lap_index, s.row_index));
    }
    for (int id : res.new_nodes) link_same_lap(g, id, map);
    for (int id : revisit) {
        if (g.alive(id) && (g.up(id) < 0 || g.down(id) < 0)) link_same_lap(g, id, map);
    }

    std::vector<Candidate> cands;
    for (int id : res.new_nodes) collect_cross(g, id, cands);
    for (int id : revisit) {
        if (g.alive(id)) collect_cross(g, id, cands);
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const Candidate& x, const Candidate& y) { return x.a == y.a && x.b == y.b; }),
                cands.end());
    for (const Candidate& c : cands) {
        if (g.has_edge(c.a, c.b)) continue;
        if (!edge_feasible(map, g.position(c.a), g.position(c.b), g.geom().capsule_radius)) continue;
        if (crosses_strip_edge(g, c.a, c.b)) continue;
        g.add_edge(c.a, c.b);
    }

    std::vector<int> roots;
    for (int a : anchors) {
        if (g.alive(a)) roots.push_back(a);
    }
    if (roots.empty() && !res.new_nodes.empty()) roots.push_back(res.new_nodes.front());
    if (!roots.empty()) {
        std::vector<std::uint8_t> reach(g.size(), 0);
        for (int a : roots) {
            if (reach[a]) continue;
            const auto part = g.component_of(a);
            for (std::size_t k = 0; k < part.size(); ++k) reach[k] |= part[k];
        }
        std::vector<int> kept;
        for (int id : res.new_nodes) {
            if (reach[id]) {
                kept.push_back(id);
                continue;
            }
            const RcgNode& n = g.node(id);
            res.deferred.push_back({n.position, n.lap, n.row});
            g.erase_node(id);
        }
        res.new_nodes = std::move(kept);
    }
    res.new_edges = g.edge_count() - edges_before;
    return res;
}

// ---------------------------------------------------------------------------
// Essentiality

namespace {

/// Does edge (x, y) have the smallest clearance among x's edges to y's lap?
bool closest_transition(const RcgGraph& g, int x, int y, const std::vector<int>& others, const KnownMap& map) {
    const double cap = 2.0 * g.geom().w;
    const int pts = g.geom().clearance_points;
    const Point px = g.position(x);
    const double cy = edge_clearance(map, px, g.position(y), pts, cap);
    for (int m : others) {
        const double cm = edge_clearance(map, px, g.position(m), pts, cap);
        if (cm < cy - 1e-9) return false;
        if (std::abs(cm - cy) <= 1e-9) {
            const double ym = g.position(m).y;
            const double yy = g.position(y).y;
            if (ym < yy || (ym == yy && m < y)) return false;
        }
    }
    return true;
}

}  // namespace

bool is_essential_node(const RcgGraph& g, int id, const EssentialContext& ctx) {
    const RcgNode& n = g.node(id);
    if (ctx.protected_nodes && ctx.protected_nodes->count(id)) return true;
    if (n.retained_for_connectivity || n.partition_boundary) return true;
    if (n.is_link && n.state == NodeState::Open) return true;
    if (ball_touches_unknown(*ctx.map, n.position, g.geom().w)) return true;
    const int u = g.up(id);
    const int d = g.down(id);
    if (u < 0 || d < 0) return true;
    if (n.state == NodeState::Open &&
        (g.state(u) == NodeState::Closed || g.state(d) == NodeState::Closed)) {
        return true;
    }
    for (int x : n.adj) {
        const RcgNode& nx = g.node(x);
        if (nx.lap == n.lap || !g.is_lap_end(x)) continue;
        std::vector<int> others;
        for (int m : g.side_neighbors(x, n.lap - nx.lap)) {
            if (m != id) others.push_back(m);
        }
        if (others.empty()) return true;
        const bool any_end = std::any_of(others.begin(), others.end(), [&](int m) { return g.is_lap_end(m); });
        if (!any_end && closest_transition(g, x, id, others, *ctx.map)) return true;
    }
    return false;
}

bool is_essential_edge(const RcgGraph& g, int a, int b, const KnownMap& map) {
    if (g.node(a).lap == g.node(b).lap) return true;
    const bool ea = g.is_lap_end(a);
    const bool eb = g.is_lap_end(b);
    if (ea && eb) return true;
    if (!ea && !eb) return false;
    const int x = ea ? a : b;
    const int y = ea ? b : a;
    std::vector<int> others;
    for (int m : g.side_neighbors(x, g.node(y).lap - g.node(x).lap)) {
        if (m != y) others.push_back(m);
    }
    if (others.empty()) return true;
    if (std::any_of(others.begin(), others.end(), [&](int m) { return g.is_lap_end(m); })) return false;
    return closest_transition(g, x, y, others, map);
}

// ---------------------------------------------------------------------------
// Pruning

namespace {

struct Pruner {
    RcgGraph& g;
    const EssentialContext& ctx;
    PruneReport& report;
    std::set<int> touched;

    bool is_protected(int id) const { return ctx.protected_nodes && ctx.protected_nodes->count(id); }

    void touch_around(int id) {
        touched.insert(id);
        for (int m : g.node(id).adj) touched.insert(m);
    }

    /// Reachability of all targets from `from` in the graph as it would be
    /// after dropping node `skip_node` and edge (skip_a, skip_b) and adding edge
    /// (extra_a, extra_b).
    bool still_connected(int from, const std::vector<int>& targets, int skip_node, int skip_a, int skip_b,
                         int extra_a, int extra_b) const {
        std::unordered_set<int> pending;
        for (int t : targets) {
            if (t != from && t != skip_node) pending.insert(t);
        }
        if (pending.empty()) return true;
        std::vector<std::uint8_t> seen(g.size(), 0);
        std::deque<int> queue{from};
        seen[from] = 1;
        auto visit = [&](int m) {
            if (m == skip_node || seen[m]) return false;
            seen[m] = 1;
            queue.push_back(m);
            return pending.erase(m) && pending.empty();
        };
        while (!queue.empty()) {
            const int n = queue.front();
            queue.pop_front();
            for (int m : g.node(n).adj) {
                if ((n == skip_a && m == skip_b) || (n == skip_b && m == skip_a)) continue;
                if (visit(m)) return true;
            }
            if (n == extra_a && visit(extra_b)) return true;
            if (n == extra_b && visit(extra_a)) return true;
        }
        return false;
    }

    /// Removes a node, merging its two same-lap edges into one and dropping its
    /// cross-lap edges. Keeps (and flags) the node when that would split the graph.
    bool remove_node(int id, const char* kind) {
        const RcgNode& n = g.node(id);
        const int u = g.up(id);
        const int d = g.down(id);
        const std::vector<int> nbrs = n.adj;
        if (!nbrs.empty()) {
            const int ea = (u >= 0 && d >= 0) ? u : -1;
            const int eb = (u >= 0 && d >= 0) ? d : -1;
            if (!still_connected(nbrs.front(), nbrs, id, -1, -1, ea, eb)) {
                g.node_mut(id).retained_for_connectivity = true;
                ++report.retained;
                report.events.push_back({"retained", id, -1});
                return false;
            }
        }
        g.erase_node(id);
        if (u >= 0 && d >= 0) g.add_edge(u, d);
        for (int m : nbrs) touch_around(m);
        report.events.push_back({kind, id, -1});
        return true;
    }

    bool remove_edge(int a, int b) {
        if (!still_connected(a, {b}, -1, a, b, -1, -1)) return false;
        g.remove_edge(a, b);
        touch_around(a);
        touch_around(b);
        report.events.push_back({"edge", a, b});
        return true;
    }
};

}  // namespace

PruneReport prune(RcgGraph& g, const std::vector<int>& candidates, const EssentialContext& ctx) {
    PruneReport report;
    Pruner pr{g, ctx, report, {}};

    for (int id : g.alive_ids()) {
        const RcgNode& n = g.node(id);
        if (n.is_link && n.state == NodeState::Closed && !pr.is_protected(id) && !n.retained_for_connectivity) {
            if (pr.remove_node(id, "link")) ++report.links_removed;
        }
    }

    std::set<int> work(candidates.begin(), candidates.end());
    work.insert(pr.touched.begin(), pr.touched.end());
    for (int round = 0; round < 64 && !work.empty(); ++round) {
        ++report.rounds;
        pr.touched.clear();

        std::vector<int> inessential;
        for (int id : work) {
            if (g.alive(id) && !is_essential_node(g, id, ctx)) inessential.push_back(id);
        }
        for (int id : inessential) {
            if (g.alive(id) && pr.remove_node(id, "node")) ++report.nodes_removed;
        }

        std::set<int> edge_scope(work.begin(), work.end());
        edge_scope.insert(pr.touched.begin(), pr.touched.end());
        for (int id : edge_scope) {
            if (!g.alive(id)) continue;
            const int lap = g.node(id).lap;
            std::vector<int> cross;
            for (int m : g.node(id).adj) {
                if (g.node(m).lap != lap) cross.push_back(m);
            }
            for (int m : cross) {
                if (!g.alive(id) || !g.has_edge(id, m)) continue;
                if (!is_essential_edge(g, id, m, *ctx.map) && pr.remove_edge(id, m)) ++report.edges_removed;
            }
        }

        work.clear();
        for (int id : pr.touched) {
            if (g.alive(id)) work.insert(id);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Invariants

InvariantReport check_invariants(const RcgGraph& g, const EssentialContext& ctx, bool check_essential) {
    InvariantReport rep;
    auto fail = [&](std::string msg) { rep.violations.push_back(std::move(msg)); };
    const std::vector<int> ids = g.alive_ids();

    int open = 0;
    long long degree_sum = 0;
    for (int id : ids) {
        const RcgNode& n = g.node(id);
        if (n.state == NodeState::Open) ++open;
        int above = 0;
        int below = 0;
        for (std::size_t k = 0; k < n.adj.size(); ++k) {
            const int m = n.adj[k];
            if (m == id) fail("P1 self loop at " + std::to_string(id));
            if (k > 0 && n.adj[k - 1] >= m) fail("P1 duplicate/unsorted adjacency at " + std::to_string(id));
            if (!g.alive(m)) fail("edge to dead node " + std::to_string(id) + "-" + std::to_string(m));
            else if (!g.has_edge(m, id)) fail("asymmetric edge " + std::to_string(id) + "-" + std::to_string(m));
            if (g.alive(m) && g.node(m).lap == n.lap) {
                if (g.node(m).row > n.row) ++above;
                else ++below;
            }
            if (g.alive(m) && std::abs(g.node(m).lap - n.lap) > 1) {
                fail("edge spans non-adjacent laps " + std::to_string(id) + "-" + std::to_string(m));
            }
        }
        if (above > 1 || below > 1) fail("more than one same-lap neighbour per side at " + std::to_string(id));
        degree_sum += static_cast<long long>(n.adj.size());
    }
    if (open != g.open_count()) fail("open/closed bookkeeping mismatch");
    if (degree_sum != 2LL * g.edge_count()) fail("edge count mismatch");

    // P2: sweep over x-sorted edges; only overlapping x-ranges are compared.
    std::vector<RcgEdge> es = g.edges();
    std::sort(es.begin(), es.end(), [&](const RcgEdge& a, const RcgEdge& b) {
        const double ax = std::min(g.position(a.a).x, g.position(a.b).x);
        const double bx = std::min(g.position(b.a).x, g.position(b.b).x);
        return ax != bx ? ax < bx : std::tie(a.a, a.b) < std::tie(b.a, b.b);
    });
    std::vector<std::size_t> active;
    for (std::size_t k = 0; k < es.size(); ++k) {
        const Point p = g.position(es[k].a);
        const Point q = g.position(es[k].b);
        const double lo = std::min(p.x, q.x);
        std::vector<std::size_t> still;
        for (std::size_t a : active) {
            const Point r = g.position(es[a].a);
            const Point s = g.position(es[a].b);
            if (std::max(r.x, s.x) < lo - 1e-9) continue;
            still.push_back(a);
            if (segments_conflict(p, q, r, s)) {
                fail("P2 crossing edges " + std::to_string(es[k].a) + "-" + std::to_string(es[k].b) + " x " +
                     std::to_string(es[a].a) + "-" + std::to_string(es[a].b));
            }
        }
        still.push_back(k);
        active.swap(still);
    }

    if (!ids.empty()) {
        const auto reach = g.component_of(ids.front());
        for (int id : ids) {
            if (!reach[id]) {
                fail("P3 node " + std::to_string(id) + " disconnected");
                break;
            }
        }
    }

    if (check_essential) {
        for (int id : ids) {
            if (!is_essential_node(g, id, ctx)) fail("P4 inessential node " + std::to_string(id));
        }
    }

    const long long n = static_cast<long long>(ids.size());
    if (n >= 3 && g.edge_count() > 3 * n - 6) fail("P6 |E| exceeds 3|N|-6");
    return rep;
}

}  // namespace cstar
