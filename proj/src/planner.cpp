#include "cstar/planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cstar {

const char* direction_name(Direction d) {
    switch (d) {
        case Direction::Left: return "L";
        case Direction::Up: return "U";
        case Direction::Down: return "D";
        case Direction::Right: return "R";
    }
    return "?";
}

const char* tour_end_name(TourEnd e) {
    switch (e) {
        case TourEnd::Goal: return "goal";
        case TourEnd::Start: return "start";
        case TourEnd::Free: return "free";
    }
    return "?";
}

namespace {

bool permitted(const NodeFilter& allow, int id) { return !allow || allow(id); }

bool is_open(const RcgGraph& g, int id) { return id >= 0 && g.alive(id) && g.state(id) == NodeState::Open; }

std::vector<int> open_on_side(const RcgGraph& g, int node, Direction d, int skip, const NodeFilter& allow) {
    std::vector<int> cand;
    switch (d) {
        case Direction::Left: cand = g.side_neighbors(node, -1); break;
        case Direction::Right: cand = g.side_neighbors(node, +1); break;
        case Direction::Up: cand = {g.up(node)}; break;
        case Direction::Down: cand = {g.down(node)}; break;
    }
    std::vector<int> out;
    for (int m : cand) {
        if (m != skip && is_open(g, m) && permitted(allow, m)) out.push_back(m);
    }
    return out;
}

constexpr Direction kPriority[] = {Direction::Left, Direction::Up, Direction::Down, Direction::Right};

// No obstacle or boundary cell within r of p.
bool clear_point(const KnownMap& map, Point p, double r) {
    const GridGeometry& geo = map.geometry();
    const double res = geo.resolution_m;
    const int i0 = static_cast<int>(std::floor((p.x - r) / res));
    const int i1 = static_cast<int>(std::floor((p.x + r) / res));
    const int j0 = static_cast<int>(std::floor((p.y - r) / res));
    const int j1 = static_cast<int>(std::floor((p.y + r) / res));
    for (int j = j0; j <= j1; ++j) {
        for (int i = i0; i <= i1; ++i) {
            if (geo.in_bounds(i, j) && map.at(i, j) != Cell::Obstacle) continue;
            const Point lo{i * res, j * res};
            if (point_rect_distance(p, lo, {lo.x + res, lo.y + res}) <= r) return false;
        }
    }
    return true;
}

constexpr int kNbr8[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}};

// Uncovered lattice points in the hole's bounding box reachable from its nodes
// through feasible lattice steps.
std::vector<Point> appended_stops(const RcgGraph& g, const std::vector<int>& nodes, const KnownMap& map,
                                  const HoleParams& params) {
    if (!params.coverage) return {};
    const Lattice& lat = g.lattice();
    const double radius = g.geom().capsule_radius;
    int k0 = nodes.empty() ? 0 : g.node(nodes.front()).lap;
    int k1 = k0;
    int r0 = nodes.empty() ? 0 : g.node(nodes.front()).row;
    int r1 = r0;
    for (int id : nodes) {
        k0 = std::min(k0, g.node(id).lap);
        k1 = std::max(k1, g.node(id).lap);
        r0 = std::min(r0, g.node(id).row);
        r1 = std::max(r1, g.node(id).row);
    }
    const GridGeometry& geo = map.geometry();
    auto candidate = [&](int k, int j) {
        if (k < k0 || k > k1 || j < r0 || j > r1) return false;
        if (g.node_at(k, j) >= 0) return false;
        const Point p = lat.at(k, j);
        const int cell = geo.cell_of(p);
        if (cell < 0 || map.at(cell) != Cell::Free) return false;
        if (params.coverage->covered(cell)) return false;
        return clear_point(map, p, params.sample_clearance * g.geom().w);
    };
    std::map<std::pair<int, int>, bool> seen;
    std::vector<std::pair<int, int>> frontier;
    std::vector<std::pair<int, int>> found;
    auto try_slot = [&](Point from, int k, int j) {
        auto key = std::make_pair(k, j);
        if (seen.count(key)) return;
        if (!candidate(k, j)) return;
        if (!edge_feasible(map, from, lat.at(k, j), radius)) return;
        seen[key] = true;
        frontier.push_back(key);
        found.push_back(key);
    };
    for (int id : nodes) {
        for (const auto& d : kNbr8) try_slot(g.position(id), g.node(id).lap + d[0], g.node(id).row + d[1]);
    }
    while (!frontier.empty()) {
        const auto [k, j] = frontier.back();
        frontier.pop_back();
        if (static_cast<int>(found.size()) > params.max_appended) break;
        for (const auto& d : kNbr8) try_slot(lat.at(k, j), k + d[0], j + d[1]);
    }
    std::sort(found.begin(), found.end());
    std::vector<Point> out;
    for (const auto& [k, j] : found) out.push_back(lat.at(k, j));
    return out;
}

}  // namespace

std::vector<int> first_open_side(const RcgGraph& g, int node, int skip, const NodeFilter& allow) {
    for (Direction d : kPriority) {
        auto side = open_on_side(g, node, d, skip, allow);
        if (!side.empty()) return side;
    }
    return {};
}

GoalChoice select_goal_node(const RcgGraph& g, int current, const std::set<int>& retreat, Rng& rng,
                            const NodeFilter& allow) {
    GoalChoice out;
    for (Direction d : kPriority) {
        const auto side = open_on_side(g, current, d, -1, allow);
        if (side.empty()) continue;
        out.kind = GoalKind::Node;
        out.direction = d;
        if (side.size() == 1) {
            out.node = side.front();
        } else {
            std::uniform_int_distribution<std::size_t> pick(0, side.size() - 1);
            out.node = side[pick(rng)];
        }
        return out;
    }
    const bool any_retreat =
        std::any_of(retreat.begin(), retreat.end(), [&](int id) { return id != current && is_open(g, id); });
    out.kind = any_retreat ? GoalKind::DeadEnd : GoalKind::Complete;
    return out;
}

StateUpdate update_state(RcgGraph& g, int current, const GoalChoice& goal) {
    StateUpdate out;
    const int u = g.up(current);
    const int d = g.down(current);
    const bool up_closed = u < 0 || g.state(u) == NodeState::Closed;
    const bool down_closed = d < 0 || g.state(d) == NodeState::Closed;
    if (!up_closed && !down_closed) return out;
    if (g.state(current) == NodeState::Open) {
        g.set_state(current, NodeState::Closed);
        out.closed = true;
    }
    if (goal.kind != GoalKind::Node || goal.direction != Direction::Left) return out;
    const double step = g.geom().w;
    const RcgNode base = g.node(current);  // copy: link creation grows the node store
    for (int dir : {+1, -1}) {
        const int nb = dir > 0 ? u : d;
        if (!is_open(g, nb)) continue;
        if (distance(base.position, g.position(nb)) <= step + 1e-9) continue;
        if (g.node_at(base.lap, base.row + dir) >= 0) continue;
        out.links.push_back(g.create_link_node(current, dir));
    }
    return out;
}

void update_retreat_set(const RcgGraph& g, std::set<int>& retreat, Point pos, int exclude, const NodeFilter& allow) {
    for (auto it = retreat.begin(); it != retreat.end();) {
        if (!is_open(g, *it)) it = retreat.erase(it);
        else ++it;
    }
    const Lattice& lat = g.lattice();
    const double reach = std::sqrt(2.0) * lat.w + 1e-9;
    const int k = lat.nearest_lap(pos.x);
    const int j = lat.nearest_row(pos.y);
    for (int dk = -2; dk <= 2; ++dk) {
        for (int dj = -2; dj <= 2; ++dj) {
            const int id = g.node_at(k + dk, j + dj);
            if (id < 0 || id == exclude || !is_open(g, id) || !permitted(allow, id)) continue;
            if (distance(pos, g.position(id)) <= reach) retreat.insert(id);
        }
    }
}

EscapePlan escape_dead_end(const RcgGraph& g, int current, const std::set<int>& retreat) {
    EscapePlan best;
    bool any = false;
    for (int id : retreat) {
        if (id == current || !is_open(g, id)) continue;
        any = true;
        PathResult p = astar(g, current, id);
        if (!p.found()) continue;
        if (p.cost < best.cost) {
            best.goal = id;
            best.cost = p.cost;
            best.path = std::move(p.nodes);
        }
    }
    if (any && best.goal < 0) throw std::logic_error("retreat node unreachable: graph disconnected");
    return best;
}

EscapePlan nearest_matching(const RcgGraph& g, int current, const std::function<bool(int)>& pick) {
    std::vector<int> targets;
    for (int id : g.alive_ids()) {
        if (id != current && pick(id)) targets.push_back(id);
    }
    EscapePlan best;
    if (targets.empty()) return best;
    const ShortestPathTree t = dijkstra(g, current, targets);
    for (int id : targets) {
        if (t.dist[id] < best.cost) {
            best.goal = id;
            best.cost = t.dist[id];
        }
    }
    if (best.goal < 0) throw std::logic_error("open node unreachable: graph disconnected");
    best.path = t.path_to(best.goal);
    return best;
}

std::vector<CoverageHole> detect_coverage_holes(const RcgGraph& g, int current, int goal, const KnownMap& map,
                                                const HoleParams& params, const NodeFilter& allow) {
    std::vector<CoverageHole> holes;
    std::set<int> labelled;
    const std::vector<int> continuation = goal >= 0 ? first_open_side(g, goal, current, allow) : std::vector<int>{};
    for (int start : g.node(current).adj) {
        if (start == goal || !is_open(g, start) || !permitted(allow, start) || labelled.count(start)) continue;
        std::vector<int> region;
        std::vector<int> stack{start};
        labelled.insert(start);
        bool too_big = false;
        while (!stack.empty()) {
            const int n = stack.back();
            stack.pop_back();
            region.push_back(n);
            if (static_cast<int>(region.size()) > params.max_nodes) too_big = true;
            for (int m : g.node(n).adj) {
                if (m == goal || m == current || labelled.count(m)) continue;
                if (!is_open(g, m) || !permitted(allow, m)) continue;
                labelled.insert(m);
                stack.push_back(m);
            }
        }
        if (too_big) continue;
        std::sort(region.begin(), region.end());
        const double w = g.geom().w;
        bool disqualified = std::any_of(region.begin(), region.end(),
                                        [&](int id) { return ball_touches_unknown(map, g.position(id), w); });
        if (!disqualified) {
            disqualified = std::any_of(continuation.begin(), continuation.end(), [&](int id) {
                return std::binary_search(region.begin(), region.end(), id);
            });
        }
        if (disqualified) continue;
        CoverageHole hole;
        hole.nodes = std::move(region);
        hole.appended = appended_stops(g, hole.nodes, map, params);
        if (static_cast<int>(hole.appended.size()) > params.max_appended) continue;
        hole.label = static_cast<int>(holes.size()) + 1;
        holes.push_back(std::move(hole));
    }
    // A tour ending on a goal further along the same lap would skip that
    // stretch; its uncovered lattice points become stops of the first hole.
    if (!holes.empty() && goal >= 0 && params.coverage && g.node(goal).lap == g.node(current).lap) {
        const int lap = g.node(current).lap;
        const int lo = std::min(g.node(current).row, g.node(goal).row);
        const int hi = std::max(g.node(current).row, g.node(goal).row);
        const GridGeometry& geo = map.geometry();
        for (int j = lo + 1; j < hi; ++j) {
            if (g.node_at(lap, j) >= 0) continue;
            const Point p = g.lattice().at(lap, j);
            const int cell = geo.cell_of(p);
            if (cell < 0 || map.at(cell) != Cell::Free || params.coverage->covered(cell)) continue;
            holes.front().appended.push_back(p);
        }
    }
    return holes;
}

SearchGraph hole_search_graph(const std::vector<CoverageHole>& holes, const RcgGraph& g, const KnownMap& map,
                              std::vector<int>* appended_ids) {
    SearchGraph sg;
    for (int id = 0; id < g.size(); ++id) sg.add_node(g.position(id));
    for (const RcgEdge& e : g.edges()) sg.add_edge(e.a, e.b, e.length);

    const Lattice& lat = g.lattice();
    const double radius = g.geom().capsule_radius;
    std::map<std::pair<int, int>, int> slot;
    for (const CoverageHole& h : holes) {
        for (Point p : h.appended) {
            const auto key = std::make_pair(lat.nearest_lap(p.x), lat.nearest_row(p.y));
            if (slot.count(key)) continue;
            const int id = sg.add_node(p);
            slot[key] = id;
            if (appended_ids) appended_ids->push_back(id);
        }
    }
    for (const auto& [key, id] : slot) {
        for (const auto& d : kNbr8) {
            const auto other = std::make_pair(key.first + d[0], key.second + d[1]);
            int m = -1;
            auto it = slot.find(other);
            if (it != slot.end()) {
                if (it->second < id) continue;  // each appended pair once
                m = it->second;
            } else {
                m = g.node_at(other.first, other.second);
            }
            if (m < 0) continue;
            const Point a = sg.position(id);
            const Point b = sg.position(m);
            if (edge_feasible(map, a, b, radius)) sg.add_edge(id, m, distance(a, b));
        }
    }
    return sg;
}

TspPlan compute_tsp_trajectory(const std::vector<CoverageHole>& holes, int current, int goal, const RcgGraph& g,
                               const KnownMap& map) {
    TspPlan plan;
    plan.start = current;
    std::set<int> hole_set;
    for (const CoverageHole& h : holes) hole_set.insert(h.nodes.begin(), h.nodes.end());
    plan.hole_nodes.assign(hole_set.begin(), hole_set.end());

    auto open_non_hole_neighbor = [&](int n) {
        for (int m : g.node(n).adj) {
            if (m != current && is_open(g, m) && !hole_set.count(m)) return true;
        }
        return false;
    };
    if (goal >= 0 && (open_non_hole_neighbor(goal) || ball_touches_unknown(map, g.position(goal), g.geom().w))) {
        plan.end_rule = TourEnd::Goal;
    } else if (std::any_of(g.node(current).adj.begin(), g.node(current).adj.end(),
                           [&](int m) { return is_open(g, m) && !hole_set.count(m); })) {
        plan.end_rule = TourEnd::Start;
    } else {
        plan.end_rule = TourEnd::Free;
    }

    std::vector<int> appended;
    const SearchGraph sg = hole_search_graph(holes, g, map, &appended);
    plan.appended = static_cast<int>(appended.size());

    std::vector<int> stops{current};
    stops.insert(stops.end(), plan.hole_nodes.begin(), plan.hole_nodes.end());
    stops.insert(stops.end(), appended.begin(), appended.end());
    if (plan.end_rule == TourEnd::Goal) stops.push_back(goal);
    const int n = static_cast<int>(stops.size());

    std::vector<ShortestPathTree> trees;
    trees.reserve(n);
    TspInstance inst;
    inst.cost.assign(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a) {
        trees.push_back(dijkstra(sg, stops[a], stops));
        for (int b = 0; b < n; ++b) {
            const double c = trees[a].dist[stops[b]];
            if (c == kUnreachable) throw std::logic_error("hole stop unreachable: graph disconnected");
            inst.cost[a][b] = c;
        }
    }
    // Dijkstra sums may differ in the last bit between directions.
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) inst.cost[a][b] = inst.cost[b][a] = std::min(inst.cost[a][b], inst.cost[b][a]);
    }
    inst.start = 0;
    inst.end = plan.end_rule == TourEnd::Goal ? n - 1 : plan.end_rule == TourEnd::Start ? 0 : -1;
    plan.tour = solve_tsp(inst);

    auto push = [&](int v, bool stop) {
        plan.waypoints.push_back({sg.position(v), v < g.size() ? v : -1, v, stop});
    };
    push(current, true);
    int last = current;
    for (std::size_t k = 1; k < plan.tour.order.size(); ++k) {
        const int b = stops[plan.tour.order[k]];
        const int ia = plan.tour.order[k - 1];
        const std::vector<int> path = trees[ia].path_to(b);
        for (std::size_t s = 1; s < path.size(); ++s) push(path[s], s + 1 == path.size());
        last = b;
    }
    plan.cost = plan.tour.cost;
    if (last >= g.size()) {
        // A free tour may stop between graph nodes; finish on the closest one.
        std::vector<int> targets;
        for (int id : g.alive_ids()) targets.push_back(id);
        const ShortestPathTree t = dijkstra(sg, last, targets);
        int best = -1;
        for (int id : targets) {
            if (t.dist[id] < kUnreachable && (best < 0 || t.dist[id] < t.dist[best])) best = id;
        }
        if (best < 0) throw std::logic_error("tour end stranded");
        const std::vector<int> path = t.path_to(best);
        for (std::size_t s = 1; s < path.size(); ++s) push(path[s], false);
        plan.cost += t.dist[best];
        last = best;
    }
    plan.end_node = last;
    return plan;
}

}  // namespace cstar
