#include "cstar/missions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cstar/kernels.hpp"
#include "cstar/search.hpp"

namespace cstar {

using nlohmann::ordered_json;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

}  // namespace

// ---------------------------------------------------------------------------
// Energy

GuardDecision energy_step_guard(const RcgGraph& g, int current, int goal, double move_length, double remaining,
                                int station, double rate) {
    GuardDecision d;
    const ShortestPathTree home = dijkstra(g, station, {current, goal});
    d.current_return_cost = home.dist[current] * rate;
    d.return_cost = home.dist[goal] * rate;
    d.move_cost = move_length * rate;
    if (home.dist[current] == kUnreachable || remaining < d.current_return_cost - 1e-9) {
        throw InfeasibleMission("stranded: not enough energy to return to the station");
    }
    if (energy_allows(remaining, d.move_cost, d.return_cost)) return d;
    d.action = GuardAction::Retreat;
    d.retreat_path = astar(g, current, station).nodes;
    return d;
}

EscapePlan resume_after_charge(const RcgGraph& g, int station, const NodeFilter& allow) {
    return nearest_matching(g, station, [&](int id) {
        return g.state(id) == NodeState::Open && (!allow || allow(id));
    });
}

EnergyMissionRecord run_energy_mission(const Environment& env, Point start, const EpisodeConfig& cfg,
                                       const EnergyConfig& energy, TraceLog* trace) {
    EnergyMissionRecord out;
    out.station = energy.station.value_or(start);
    if (energy.capacity <= 0.0 || energy.consumption_rate <= 0.0) {
        throw std::invalid_argument("energy capacity and consumption rate must be positive");
    }
    Coordinator c(env, cfg, {out.station}, {}, trace);
    EpisodeRecord& rec = c.record();
    const double rate = energy.consumption_rate;
    double charge = energy.capacity;
    out.min_margin = energy.capacity;

    CycleRecord cycle;
    cycle.index = 1;
    std::size_t mark = 0;
    auto take = [&](std::vector<TrajectorySegment>& into, double& len) {
        const auto& segs = c.robots().front().record.segments;
        for (; mark < segs.size(); ++mark) {
            into.push_back(segs[mark]);
            len += distance(segs[mark].a, segs[mark].b);
        }
    };
    auto spend = [&](double len) {
        charge -= len * rate;
        cycle.energy_used += len * rate;
    };
    auto margin = [&](double left, double home_cost, Point where) {
        const double m = left - home_cost;
        out.min_margin = std::min(out.min_margin, m);
        if (m < -1e-9) {
            out.safety_violations.push_back("energy " + std::to_string(left) + " below return cost " +
                                            std::to_string(home_cost) + " at (" + std::to_string(where.x) + ", " +
                                            std::to_string(where.y) + ")");
        }
    };

    try {
        c.initialize();
        RobotState& r = c.robots().front();
        const int station = r.current;
        c.pinned().insert(station);
        const long cap = c.iteration_cap();
        int proceeds = 0;
        int covered_at_cycle_start = c.coverage().covered_count();

        auto go_home = [&](const std::vector<int>& path) {
            take(cycle.coverage, cycle.coverage_len);
            const double len = c.follow_nodes(r, path, SegmentMode::Retreat);
            spend(len);
            c.grow();
            take(cycle.retreat, cycle.retreat_len);
            out.cycles.push_back(cycle);
        };

        while (true) {
            if (rec.iterations >= cap) {
                rec.error = "max_iterations exceeded";
                break;
            }
            const double t0 = now_ms();
            // The guard runs before the state update so that a retreat leaves
            // the current node Open and coverage later resumes from it.
            TickPlan p = c.choose(r);
            if (p.kind == PlanKind::Done) {
                r.record.complete = true;
                go_home(astar(c.graph(), r.current, station).nodes);
                break;
            }
            const int goal = p.path.back();
            const GuardDecision d =
                energy_step_guard(c.graph(), r.current, goal, c.plan_length(p), charge, station, rate);
            if (d.action == GuardAction::Proceed) {
                c.commit(r, p);
                if (p.kind == PlanKind::Tour) {
                    const GuardDecision t = energy_step_guard(c.graph(), r.current, p.tour.end_node,
                                                              c.plan_length(p), charge, station, rate);
                    if (t.action == GuardAction::Retreat) {
                        // The plain move is affordable; the holes stay Open for later.
                        c.log("goal", {{"node", goal}, {"energy", charge}, {"action", "skip_tour"}}, &r);
                        p.kind = PlanKind::Move;
                        p.holes.clear();
                    }
                }
                // Return costs at every stop on the way, tour stops included.
                if (p.kind == PlanKind::Tour) {
                    const SearchGraph sg = hole_search_graph(p.holes, c.graph(), c.map());
                    const ShortestPathTree home = dijkstra(sg, station);
                    double left = charge;
                    for (std::size_t k = 1; k < p.tour.waypoints.size(); ++k) {
                        const TourWaypoint& wp = p.tour.waypoints[k];
                        left -= distance(p.tour.waypoints[k - 1].position, wp.position) * rate;
                        margin(left, home.dist[wp.vertex] * rate, wp.position);
                    }
                } else {
                    const ShortestPathTree home = dijkstra(c.graph(), station);
                    double left = charge;
                    for (std::size_t k = 1; k < p.path.size(); ++k) {
                        left -= distance(c.graph().position(p.path[k - 1]), c.graph().position(p.path[k])) * rate;
                        margin(left, home.dist[p.path[k]] * rate, c.graph().position(p.path[k]));
                    }
                }
                const double plan_ms = now_ms() - t0;
                spend(c.execute(r, p));
                const double t1 = now_ms();
                c.grow();
                rec.iteration_ms.push_back(plan_ms + (now_ms() - t1));
                ++rec.iterations;
                ++proceeds;
                continue;
            }

            c.log("goal",
                  {{"node", goal},
                   {"energy", charge},
                   {"needed", d.move_cost + d.return_cost},
                   {"action", "retreat"}},
                  &r);
            r.record.phase_breaks.push_back(static_cast<int>(r.record.goal_nodes.size()));
            go_home(d.retreat_path);
            const int covered_now = c.coverage().covered_count();
            if (proceeds == 0 && covered_now == covered_at_cycle_start) {
                throw InfeasibleMission("stranded: capacity too small to make progress");
            }
            proceeds = 0;
            covered_at_cycle_start = covered_now;

            charge = energy.capacity;
            cycle = CycleRecord{};
            cycle.index = static_cast<int>(out.cycles.size()) + 1;
            const EscapePlan adv = resume_after_charge(c.graph(), station);
            if (adv.goal < 0) {
                r.record.complete = true;
                break;
            }
            const double home_cost = adv.cost * rate;
            if (!energy_allows(charge, adv.cost * rate, home_cost)) {
                throw InfeasibleMission("stranded: nearest open node is out of round-trip range");
            }
            c.log("goal", {{"node", adv.goal}, {"energy", charge}, {"action", "advance"}}, &r);
            margin(charge - adv.cost * rate, home_cost, c.graph().position(adv.goal));
            spend(c.follow_nodes(r, adv.path, SegmentMode::Advance));
            c.grow();
            take(cycle.advance, cycle.advance_len);
        }
    } catch (const InfeasibleMission& e) {
        rec.error = e.what();
        out.infeasible = true;
    } catch (const std::logic_error& e) {
        rec.error = e.what();
    }
    out.episode = finalize_episode(c, trace);
    return out;
}

// ---------------------------------------------------------------------------
// Fleet

FleetConfig grid_fleet(const Environment& env, int robots, double w) {
    if (robots < 1) throw std::invalid_argument("robot count must be positive");
    int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(robots))));
    int rows = (robots + cols - 1) / cols;
    if (rows * cols != robots) throw std::invalid_argument("robot count must fill a rows x cols grid");
    const GridGeometry& geo = env.geometry();
    const double cw = geo.width_m / cols;
    const double ch = geo.height_m / rows;
    FleetConfig f;
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            const Box b{{i * cw, j * ch}, {(i + 1) * cw, (j + 1) * ch}};
            f.partition.push_back(b);
            // Outer corner: the side facing the nearer workspace wall.
            const bool right = 2 * i + 1 > cols;
            const bool top = 2 * j + 1 > rows;
            f.starts.push_back({right ? b.hi.x - 0.5 * w : b.lo.x + 0.5 * w, top ? b.hi.y - 0.5 * w : b.lo.y + 0.5 * w});
        }
    }
    return f;
}

namespace {

std::vector<double> region_coverage(const Environment& env, const std::vector<std::uint8_t>& covered,
                                    const std::vector<Box>& regions) {
    const kernels::CoarseCoverage cc = kernels::evaluate_coverage_serial(env, covered, 1.0);
    std::vector<int> free_cells(regions.size(), 0);
    std::vector<int> hit(regions.size(), 0);
    for (int cj = 0; cj < cc.cny; ++cj) {
        for (int ci = 0; ci < cc.cnx; ++ci) {
            const int k = cj * cc.cnx + ci;
            if (cc.free_fine[k] != cc.total_fine[k]) continue;
            const Point centre{ci + 0.5, cj + 0.5};
            for (std::size_t q = 0; q < regions.size(); ++q) {
                if (!regions[q].contains_closed(centre)) continue;
                ++free_cells[q];
                if (cc.any_covered[k]) ++hit[q];
                break;
            }
        }
    }
    std::vector<double> out;
    for (std::size_t q = 0; q < regions.size(); ++q) {
        out.push_back(free_cells[q] == 0 ? 100.0 : 100.0 * hit[q] / free_cells[q]);
    }
    return out;
}

}  // namespace

FleetRecord run_fleet(const Environment& env, const FleetConfig& fleet, const EpisodeConfig& cfg, TraceLog* trace) {
    if (fleet.partition.size() != fleet.starts.size() || fleet.starts.empty()) {
        throw std::invalid_argument("fleet needs one region per robot");
    }
    for (std::size_t k = 0; k < fleet.starts.size(); ++k) {
        if (!fleet.partition[k].contains_closed(fleet.starts[k])) {
            throw std::invalid_argument("robot " + std::to_string(k) + " starts outside its region");
        }
        if (!env.is_free(fleet.starts[k])) {
            throw InfeasibleMission("robot " + std::to_string(k) + " starts inside an obstacle");
        }
    }
    FleetRecord out;
    out.partition = fleet.partition;
    Coordinator c(env, cfg, fleet.starts, fleet.partition, trace);
    EpisodeRecord& rec = c.record();
    try {
        c.initialize();
        const long cap = c.iteration_cap();
        while (true) {
            if (rec.iterations >= cap) {
                rec.error = "max_iterations exceeded";
                break;
            }
            const double t0 = now_ms();
            std::vector<TickPlan> plans;
            bool any = false;
            for (RobotState& r : c.robots()) {
                plans.push_back(c.plan(r));
                any = any || plans.back().kind != PlanKind::Done;
            }
            if (!any) break;
            const double plan_ms = now_ms() - t0;
            for (std::size_t k = 0; k < plans.size(); ++k) c.execute(c.robots()[k], plans[k]);
            const double t1 = now_ms();
            c.grow();
            rec.iteration_ms.push_back(plan_ms + (now_ms() - t1));
            ++rec.iterations;
        }
    } catch (const std::logic_error& e) {
        rec.error = e.what();
    }
    for (RobotState& r : c.robots()) {
        const int me = r.index;
        const auto ids = c.graph().alive_ids();
        r.record.complete = std::none_of(ids.begin(), ids.end(), [&](int id) {
            return c.graph().node(id).region == me && c.graph().state(id) == NodeState::Open;
        });
    }
    out.episode = finalize_episode(c, trace);
    out.region_coverage = region_coverage(env, out.episode.covered, fleet.partition);
    for (double v : out.region_coverage) out.region_complete.push_back(v >= 100.0 - 1e-9);
    return out;
}

}  // namespace cstar
