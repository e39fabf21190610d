#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cstar/engine.hpp"

namespace cstar {

/// Raised when a mission cannot be carried out with the given configuration.
struct InfeasibleMission : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Energy-limited coverage

struct EnergyConfig {
    double capacity{360.0};
    double consumption_rate{1.0};  // units per metre
    std::optional<Point> station;  // defaults to the scenario start
};

/// Enough energy left to reach the goal and still return from it.
inline bool energy_allows(double remaining, double move_cost, double return_cost) {
    return remaining - move_cost >= return_cost - 1e-9;
}

enum class GuardAction { Proceed, Retreat };

struct GuardDecision {
    GuardAction action{GuardAction::Proceed};
    double move_cost{0.0};
    double return_cost{0.0};          // from the goal
    double current_return_cost{0.0};  // from where the robot stands
    std::vector<int> retreat_path;    // current .. station, only for Retreat
};

/// Decides at `current` whether the move to `goal` (length `move_length`) is
/// affordable. Throws InfeasibleMission when even the way home is not.
GuardDecision energy_step_guard(const RcgGraph& g, int current, int goal, double move_length, double remaining,
                                int station, double rate);

/// Nearest Open node from the station by path cost; goal -1 when none is left.
EscapePlan resume_after_charge(const RcgGraph& g, int station, const NodeFilter& allow = {});

struct CycleRecord {
    int index{0};
    std::vector<TrajectorySegment> advance;
    std::vector<TrajectorySegment> coverage;
    std::vector<TrajectorySegment> retreat;
    double advance_len{0.0};
    double coverage_len{0.0};
    double retreat_len{0.0};
    double energy_used{0.0};
};

struct EnergyMissionRecord {
    EpisodeRecord episode;
    std::vector<CycleRecord> cycles;
    Point station;
    /// Smallest (remaining energy - cost home) seen at any node or tour stop.
    double min_margin{0.0};
    std::vector<std::string> safety_violations;
    bool infeasible{false};
};

EnergyMissionRecord run_energy_mission(const Environment& env, Point start, const EpisodeConfig& cfg,
                                       const EnergyConfig& energy, TraceLog* trace = nullptr);

// ---------------------------------------------------------------------------
// Fleet coverage

struct FleetConfig {
    std::vector<Box> partition;
    std::vector<Point> starts;
    int robot_count() const { return static_cast<int>(starts.size()); }
};

/// Splits the workspace into a near-square grid of equal cells (1, 2, 4, 6,
/// 9 ... robots) and starts each robot at its cell's outer corner, half a
/// lane in from the walls.
FleetConfig grid_fleet(const Environment& env, int robots, double w);

struct FleetRecord {
    EpisodeRecord episode;
    std::vector<Box> partition;
    std::vector<double> region_coverage;  // percent of each region's free cells
    std::vector<bool> region_complete;
};

/// One shared map and graph, synchronous ticks: every active robot plans in
/// index order, then all move, then the graph grows once.
FleetRecord run_fleet(const Environment& env, const FleetConfig& fleet, const EpisodeConfig& cfg,
                      TraceLog* trace = nullptr);

}  // namespace cstar
