#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "cstar/rcg.hpp"
#include "cstar/search.hpp"
#include "cstar/tsp.hpp"
#include "cstar/world.hpp"

namespace cstar {

/// Lap frame: laps are vertical, Left is the smaller lap index, Up is +y.
enum class Direction { Left, Up, Down, Right };
const char* direction_name(Direction d);

enum class GoalKind { Node, DeadEnd, Complete };

struct GoalChoice {
    GoalKind kind{GoalKind::Complete};
    int node{-1};
    Direction direction{Direction::Left};
};

/// Restricts which nodes a robot may pick; empty means every node.
using NodeFilter = std::function<bool(int)>;

/// First Open neighbour in the order Left, Up, Down, Right. Several Open
/// neighbours on the chosen side lap are resolved by a uniform pick from `rng`.
GoalChoice select_goal_node(const RcgGraph& g, int current, const std::set<int>& retreat, Rng& rng,
                            const NodeFilter& allow = {});

/// Open neighbours on the first non-empty side in priority order, ignoring `skip`.
std::vector<int> first_open_side(const RcgGraph& g, int node, int skip, const NodeFilter& allow = {});

struct StateUpdate {
    bool closed{false};
    std::vector<int> links;
};

/// Closes `current` when its up or down neighbour is Closed or missing. When
/// closing on the way to a left goal, an Open same-lap neighbour farther than
/// one step gets a link node one step away.
StateUpdate update_state(RcgGraph& g, int current, const GoalChoice& goal);

/// Adds Open nodes within sqrt(2)*w of `pos` (closed ball), except `exclude`;
/// drops nodes that are Closed or gone.
void update_retreat_set(const RcgGraph& g, std::set<int>& retreat, Point pos, int exclude,
                        const NodeFilter& allow = {});

struct EscapePlan {
    int goal{-1};
    double cost{kUnreachable};
    std::vector<int> path;  // current .. goal
};

/// Cheapest retreat node by graph path length; ties go to the smaller id.
EscapePlan escape_dead_end(const RcgGraph& g, int current, const std::set<int>& retreat);

/// Shortest path to the nearest node satisfying `pick` (other than current).
EscapePlan nearest_matching(const RcgGraph& g, int current, const std::function<bool(int)>& pick);

struct HoleParams {
    int max_nodes{16};
    int max_appended{64};
    /// Executed coverage so far; needed to place extra lattice stops.
    const CoverageMask* coverage{nullptr};
    double sample_clearance{0.25};
};

struct CoverageHole {
    int label{0};
    std::vector<int> nodes;       // RCG node ids, sorted
    std::vector<Point> appended;  // extra lattice stops inside the hole
};

std::vector<CoverageHole> detect_coverage_holes(const RcgGraph& g, int current, int goal, const KnownMap& map,
                                                const HoleParams& params, const NodeFilter& allow = {});

enum class TourEnd { Goal, Start, Free };
const char* tour_end_name(TourEnd e);

struct TourWaypoint {
    Point position;
    int node{-1};       // RCG id, -1 for appended stops and lattice passes
    int vertex{-1};     // id in hole_search_graph
    bool stop{false};   // a tour stop (hole node, appended node, or end)
};

struct TspPlan {
    TourEnd end_rule{TourEnd::Free};
    int start{-1};
    int end_node{-1};
    std::vector<TourWaypoint> waypoints;  // starts at current
    std::vector<int> hole_nodes;
    int appended{0};
    double cost{0.0};
    TspResult tour;
};

TspPlan compute_tsp_trajectory(const std::vector<CoverageHole>& holes, int current, int goal, const RcgGraph& g,
                               const KnownMap& map);

/// Search graph holding every RCG node (same ids) plus the appended stops of the
/// holes with lattice edges among them and to RCG nodes on neighbouring slots.
SearchGraph hole_search_graph(const std::vector<CoverageHole>& holes, const RcgGraph& g, const KnownMap& map,
                              std::vector<int>* appended_ids = nullptr);

}  // namespace cstar
