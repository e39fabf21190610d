#pragma once

#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "cstar/geometry.hpp"
#include "cstar/sampling.hpp"
#include "cstar/world.hpp"

namespace cstar {

enum class NodeState : std::uint8_t { Open, Closed };

struct RcgNode {
    int id{-1};
    Point position;
    int lap{0};
    int row{0};
    NodeState state{NodeState::Open};
    bool is_link{false};
    bool alive{true};
    bool partition_boundary{false};
    bool retained_for_connectivity{false};
    int region{-1};        // owning subregion in fleet runs, -1 otherwise
    std::vector<int> adj;  // sorted neighbour ids
};

struct RcgEdge {
    int a{-1};
    int b{-1};
    double length{0.0};
};

/// Geometric tests the graph needs from the discovered map.
struct RcgGeometry {
    double w{1.0};
    double capsule_radius{0.25};
    int clearance_points{5};
};

/// Straight segment is traversable: the capsule around it holds no obstacle or
/// boundary cell and every cell it crosses is known free.
bool edge_feasible(const KnownMap& map, Point a, Point b, double capsule_radius);

/// Distance from the edge to the nearest obstacle, boundary or unknown-frontier
/// cell, minimised over evenly spaced interior points. Capped at `cap`.
double edge_clearance(const KnownMap& map, Point a, Point b, int points, double cap);

/// Closed ball B(p, r) touches an unknown cell that borders known free space.
bool ball_touches_unknown(const KnownMap& map, Point p, double r);

class RcgGraph {
public:
    RcgGraph() = default;
    RcgGraph(const Lattice& lattice, RcgGeometry geom) : lattice_(lattice), geom_(geom) {}

    const Lattice& lattice() const { return lattice_; }
    const RcgGeometry& geom() const { return geom_; }

    /// Subregions acting as lap terminators: same-lap edges never cross from
    /// one region into another. The first region containing a point owns it.
    void set_regions(std::vector<Box> regions) { regions_ = std::move(regions); }
    const std::vector<Box>& regions() const { return regions_; }
    int region_of(Point p) const;

    // --- nodes -------------------------------------------------------------
    int add_node(Point p, int lap, int row, bool is_link = false);
    /// Drops the node and its incident edges.
    void erase_node(int id);
    const RcgNode& node(int id) const { return nodes_[id]; }
    RcgNode& node_mut(int id) { return nodes_[id]; }
    bool alive(int id) const { return id >= 0 && id < static_cast<int>(nodes_.size()) && nodes_[id].alive; }
    int node_at(int lap, int row) const;
    std::vector<int> alive_ids() const;
    int node_count() const { return alive_count_; }
    int edge_count() const { return edge_count_; }
    const std::vector<RcgNode>& nodes() const { return nodes_; }

    // --- edges -------------------------------------------------------------
    bool has_edge(int a, int b) const;
    void add_edge(int a, int b);
    void remove_edge(int a, int b);
    std::vector<RcgEdge> edges() const;

    // --- lap-frame neighbourhood ------------------------------------------
    int up(int id) const;
    int down(int id) const;
    std::vector<int> side_neighbors(int id, int lap_offset) const;
    bool is_lap_end(int id) const { return up(id) < 0 || down(id) < 0; }
    /// Nearest live nodes on the same lap line above/below (edge or not).
    int nearest_above(int id) const;
    int nearest_below(int id) const;

    // --- state -------------------------------------------------------------
    NodeState state(int id) const { return nodes_[id].state; }
    /// Open -> Closed only; re-opening is a logic error.
    void set_state(int id, NodeState s);
    int open_count() const { return open_count_; }
    std::vector<int> open_ids() const;

    /// Inserts a link node one lattice step above (+1) or below (-1) `base`,
    /// splitting the base's same-lap edge in that direction.
    int create_link_node(int base, int direction);

    // --- search-graph interface -------------------------------------------
    int size() const { return static_cast<int>(nodes_.size()); }
    Point position(int id) const { return nodes_[id].position; }
    template <class F>
    void for_each_neighbor(int id, F&& f) const {
        for (int n : nodes_[id].adj) f(n, distance(nodes_[id].position, nodes_[n].position));
    }

    /// True when every live node in `targets` is reachable from `from`.
    bool reaches_all(int from, const std::vector<int>& targets) const;
    /// Live nodes reachable from `from`.
    std::vector<std::uint8_t> component_of(int from) const;

    std::string to_json() const;

private:
    static long long key(int lap, int row) { return (static_cast<long long>(lap) << 32) ^ static_cast<unsigned>(row); }

    Lattice lattice_;
    RcgGeometry geom_;
    std::vector<Box> regions_;
    std::vector<RcgNode> nodes_;
    std::map<int, std::map<int, int>> lap_rows_;  // lap -> row -> id
    int alive_count_{0};
    int edge_count_{0};
    int open_count_{0};
};

// ---------------------------------------------------------------------------
// Growth

struct ExpandResult {
    std::vector<int> new_nodes;
    std::vector<FrontierSample> deferred;  // not yet connected to the anchor
    int new_edges{0};
};

/// Adds samples as Open nodes, links them along their lap and to lattice
/// neighbours on adjacent laps (shortest candidate first, skipping any edge
/// that would cross an existing one). `revisit` are older nodes near newly
/// discovered cells whose missing connections are retried. New nodes that end
/// up outside every anchor's component are withdrawn and returned as deferred.
/// With no anchors the first new node serves as one.
ExpandResult expand(RcgGraph& g, const std::vector<FrontierSample>& samples, const KnownMap& map,
                    const std::vector<int>& revisit, const std::vector<int>& anchors);

struct EssentialContext {
    const KnownMap* map{nullptr};
    const std::unordered_set<int>* protected_nodes{nullptr};
};

bool is_essential_node(const RcgGraph& g, int id, const EssentialContext& ctx);

/// Def-12 style check for a cross-lap edge between two live nodes.
bool is_essential_edge(const RcgGraph& g, int a, int b, const KnownMap& map);

struct PruneEvent {
    std::string kind;  // "node", "edge", "link", "retained"
    int a{-1};
    int b{-1};
};

struct PruneReport {
    int nodes_removed{0};
    int edges_removed{0};
    int links_removed{0};
    int retained{0};
    int rounds{0};
    std::vector<PruneEvent> events;
};

/// Removes closed link nodes, then inessential nodes and edges among the
/// candidates, repeating on touched nodes until nothing changes. Removals that
/// would split the graph are undone and the node is kept for connectivity.
PruneReport prune(RcgGraph& g, const std::vector<int>& candidates, const EssentialContext& ctx);

struct InvariantReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

InvariantReport check_invariants(const RcgGraph& g, const EssentialContext& ctx, bool check_essential = true);

}  // namespace cstar
