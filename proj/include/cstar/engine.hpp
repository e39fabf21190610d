#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cstar/planner.hpp"
#include "cstar/rcg.hpp"
#include "cstar/sampling.hpp"
#include "cstar/trace.hpp"
#include "cstar/world.hpp"

namespace cstar {

struct EpisodeConfig {
    double w{1.0};
    double speed{0.5};
    SensorConfig sensor;
    std::uint64_t seed{0};
    bool enable_hole_prevention{true};
    /// 0 picks 50 x free area / w^2.
    long max_iterations{0};
    /// Run the graph invariant checker after every prune.
    bool check_invariants{false};
    bool parallel{true};
    double turn_penalty_s{1.0};
    int hole_max_nodes{16};
    int hole_max_appended{64};

    void validate() const;
};

enum class SegmentMode { Coverage, Escape, Tsp, Advance, Retreat };
const char* segment_mode_name(SegmentMode m);

struct TrajectorySegment {
    Point a;
    Point b;
    SegmentMode mode{SegmentMode::Coverage};
};

struct RobotRecord {
    std::vector<Point> trajectory;  // continuous polyline
    std::vector<double> times;      // arrival time of each vertex
    std::vector<TrajectorySegment> segments;
    std::vector<int> goal_nodes;    // node sequence of plain goal selections
    std::vector<int> phase_breaks;  // goal_nodes indices where an escape or tour intervened
    int dead_ends{0};
    int escapes{0};
    int holes{0};
    int tours{0};
    int fallbacks{0};
    bool complete{false};
};

struct EpisodeRecord {
    std::vector<RobotRecord> robots;
    std::vector<std::string> trace;  // JSON lines
    std::vector<double> iteration_ms;
    std::vector<double> tsp_ms;
    std::vector<std::string> invariant_violations;
    int iterations{0};
    int prunes{0};
    bool completed{false};
    std::string error;
    std::string final_graph_json;
    std::vector<std::uint8_t> covered;  // union coverage mask on the fine grid
};

struct Metrics {
    double CT{0.0};
    int NT{0};
    double TL{0.0};
    double OR{0.0};
    double coverage_ratio{0.0};
};

/// Coverage on a 1 m evaluation grid: a cell counts as free when none of its
/// fine cells is blocked, and as covered when any of them is.
double coverage_ratio(const Environment& env, const std::vector<std::uint8_t>& covered, double cell_m = 1.0,
                      bool parallel = true);

/// Share of free evaluation cells the trajectory enters on more than one
/// separate occasion, in percent.
double overlap_rate(const Environment& env, const std::vector<Point>& trajectory, double cell_m = 1.0);
/// Same over several trajectories (a fleet); entries by any robot count.
double overlap_rate(const Environment& env, const std::vector<std::vector<Point>>& trajectories,
                    double cell_m = 1.0);

Metrics compute_metrics(const std::vector<Point>& trajectory, const Environment& env,
                        const std::vector<std::uint8_t>& covered, double speed, double turn_penalty_s = 1.0,
                        double grid_m = 1.0);

/// One robot inside the coordinator.
struct RobotState {
    int index{0};
    Point pos;
    int current{-1};
    std::set<int> retreat;
    Rng rng;
    NodeFilter allow;
    std::optional<Box> region;
    double time{0.0};
    double odometer{0.0};
    bool done{false};
    RobotRecord record;
};

enum class PlanKind { Move, Tour, Done };

struct TickPlan {
    PlanKind kind{PlanKind::Done};
    GoalChoice choice;
    std::vector<int> path;  // node ids for Move
    SegmentMode mode{SegmentMode::Coverage};
    TspPlan tour;
    std::vector<CoverageHole> holes;
};

/// Owns the shared map and graph; robots plan against it one after another.
class Coordinator {
public:
    Coordinator(const Environment& env, const EpisodeConfig& cfg, const std::vector<Point>& starts,
                const std::vector<Box>& regions = {}, TraceLog* trace = nullptr);

    const Environment& env() const { return env_; }
    const EpisodeConfig& config() const { return cfg_; }
    const KnownMap& map() const { return map_; }
    const RcgGraph& graph() const { return graph_; }
    RcgGraph& graph() { return graph_; }
    const CoverageMask& coverage() const { return coverage_; }
    std::vector<RobotState>& robots() { return robots_; }
    const std::vector<RobotState>& robots() const { return robots_; }
    EpisodeRecord& record() { return record_; }

    /// Nodes pruning must keep (robot positions plus extras such as a station).
    std::set<int>& pinned() { return pinned_; }

    /// Sense at every robot start and build the first graph.
    void initialize();

    /// Goal selection, state update and hole detection for one robot.
    TickPlan plan(RobotState& r);
    /// Goal selection only; the graph is left as it was.
    TickPlan choose(RobotState& r);
    /// State update and hole detection for a chosen plan; may turn it into a tour.
    void commit(RobotState& r, TickPlan& p);

    /// Walks node path, sensing every half step. Returns the length.
    double follow_nodes(RobotState& r, const std::vector<int>& path, SegmentMode mode);
    /// Walks a polyline. Returns the length.
    double follow_points(RobotState& r, const std::vector<Point>& pts, SegmentMode mode);

    /// Applies a tour: walks it and closes the hole nodes.
    double execute_tour(RobotState& r, const TickPlan& p);
    /// Moves along a Move or Tour plan. Returns the length.
    double execute(RobotState& r, const TickPlan& p);
    /// Length the plan will travel.
    double plan_length(const TickPlan& p) const;

    /// Integrates everything sensed since the last call into the graph.
    void grow();

    /// Plan, move, grow for a single robot. Returns false when the robot is done.
    bool tick(RobotState& r);

    void log(const char* kind, nlohmann::ordered_json payload, const RobotState* r = nullptr,
             bool debug_only = false);
    bool is_done(const RobotState& r) const;
    long iteration_cap() const;

private:
    void sense_at(RobotState& r, Point p);
    void move_segment(RobotState& r, Point b, SegmentMode mode);
    std::vector<FrontierSample> sample_front(const SamplingFront& front);
    std::vector<int> nodes_near_cells(const std::vector<int>& cells) const;

    const Environment& env_;
    EpisodeConfig cfg_;
    KnownMap map_;
    RcgGraph graph_;
    CoverageMask coverage_;
    std::vector<RobotState> robots_;
    std::vector<Box> regions_;
    std::set<int> pinned_;
    std::vector<FrontierSample> pending_;
    std::vector<int> discovered_;
    std::set<int> state_changed_;
    std::vector<int> last_kept_;
    Rng noise_rng_;
    TraceLog* trace_;
    EpisodeRecord record_;
    int iteration_{0};
    double last_tsp_ms_{0.0};
    double last_check_ms_{0.0};  // invariant checker, kept out of iteration timings
};

/// Copies robot records, coverage and the final graph into the episode record
/// and logs the closing event.
EpisodeRecord finalize_episode(Coordinator& c, TraceLog* trace);

/// Full single-robot run from the scenario start.
EpisodeRecord run_episode(const Environment& env, Point start, const EpisodeConfig& cfg, TraceLog* trace = nullptr);

struct MonteCarloRow {
    double sigma_loc{0.0};
    int runs{0};
    double min{0.0};
    double q1{0.0};
    double median{0.0};
    double q3{0.0};
    double max{0.0};
    std::vector<double> values;
};

struct MonteCarloConfig {
    std::vector<double> sigma_loc;
    int runs{10};
    double sigma_laser{0.015};
    double sigma_compass{0.5 * 3.14159265358979323846 / 180.0};
};

/// Coverage-ratio spread per localisation-noise level. Level 0 runs noiseless.
std::vector<MonteCarloRow> run_monte_carlo_serial(const Environment& env, Point start, const EpisodeConfig& cfg,
                                                  const MonteCarloConfig& mc);
std::vector<MonteCarloRow> run_monte_carlo(const Environment& env, Point start, const EpisodeConfig& cfg,
                                           const MonteCarloConfig& mc);

/// Quartile by linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

}  // namespace cstar
