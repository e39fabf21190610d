#include "cstar/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include "cstar/kernels.hpp"

namespace cstar {

using nlohmann::ordered_json;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

ordered_json pt(Point p) { return ordered_json::array({p.x, p.y}); }

constexpr std::uint64_t kNoiseStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

const char* segment_mode_name(SegmentMode m) {
    switch (m) {
        case SegmentMode::Coverage: return "coverage";
        case SegmentMode::Escape: return "escape";
        case SegmentMode::Tsp: return "tsp";
        case SegmentMode::Advance: return "advance";
        case SegmentMode::Retreat: return "retreat";
    }
    return "?";
}

void EpisodeConfig::validate() const {
    if (!(w > 0.0)) throw std::invalid_argument("w must be positive");
    if (!(speed > 0.0)) throw std::invalid_argument("speed must be positive");
    sensor.validate();
}

// ---------------------------------------------------------------------------
// Metrics

double coverage_ratio(const Environment& env, const std::vector<std::uint8_t>& covered, double cell_m,
                      bool parallel) {
    const kernels::CoarseCoverage cc = parallel ? kernels::evaluate_coverage_omp(env, covered, cell_m)
                                                : kernels::evaluate_coverage_serial(env, covered, cell_m);
    int free_cells = 0;
    int hit = 0;
    for (std::size_t k = 0; k < cc.free_fine.size(); ++k) {
        if (cc.free_fine[k] != cc.total_fine[k]) continue;
        ++free_cells;
        if (cc.any_covered[k]) ++hit;
    }
    return free_cells == 0 ? 100.0 : 100.0 * hit / free_cells;
}

double overlap_rate(const Environment& env, const std::vector<Point>& trajectory, double cell_m) {
    return overlap_rate(env, std::vector<std::vector<Point>>{trajectory}, cell_m);
}

double overlap_rate(const Environment& env, const std::vector<std::vector<Point>>& trajectories, double cell_m) {
    const std::vector<std::uint8_t> none(env.geometry().size(), 0);
    const kernels::CoarseCoverage cc = kernels::evaluate_coverage_serial(env, none, cell_m);
    std::vector<int> visits(cc.free_fine.size(), 0);
    const double step = 0.05 * cell_m;
    for (const std::vector<Point>& trajectory : trajectories) {
        int last = -1;
        auto enter = [&](Point p) {
            const int ci = std::clamp(static_cast<int>(std::floor(p.x / cell_m)), 0, cc.cnx - 1);
            const int cj = std::clamp(static_cast<int>(std::floor(p.y / cell_m)), 0, cc.cny - 1);
            const int c = cj * cc.cnx + ci;
            if (c != last) ++visits[c];
            last = c;
        };
        if (!trajectory.empty()) enter(trajectory.front());
        for (std::size_t k = 1; k < trajectory.size(); ++k) {
            const Point a = trajectory[k - 1];
            const Point b = trajectory[k];
            const int n = std::max(1, static_cast<int>(std::ceil(distance(a, b) / step)));
            for (int s = 1; s <= n; ++s) enter(a + (b - a) * (static_cast<double>(s) / n));
        }
    }
    int free_cells = 0;
    int repeated = 0;
    for (std::size_t k = 0; k < visits.size(); ++k) {
        if (cc.free_fine[k] != cc.total_fine[k]) continue;
        ++free_cells;
        if (visits[k] > 1) ++repeated;
    }
    return free_cells == 0 ? 0.0 : 100.0 * repeated / free_cells;
}

Metrics compute_metrics(const std::vector<Point>& trajectory, const Environment& env,
                        const std::vector<std::uint8_t>& covered, double speed, double turn_penalty_s,
                        double grid_m) {
    Metrics m;
    m.TL = polyline_length(trajectory);
    const double turning = total_turning(trajectory);
    m.NT = static_cast<int>(std::floor(turning / (std::acos(-1.0) / 2.0) + 1e-9));
    m.CT = m.TL / speed + turn_penalty_s * m.NT;
    m.OR = overlap_rate(env, trajectory, grid_m);
    m.coverage_ratio = coverage_ratio(env, covered, grid_m);
    return m;
}

// ---------------------------------------------------------------------------
// Coordinator

Coordinator::Coordinator(const Environment& env, const EpisodeConfig& cfg, const std::vector<Point>& starts,
                         const std::vector<Box>& regions, TraceLog* trace)
    : env_(env),
      cfg_(cfg),
      map_(env.geometry()),
      coverage_(env.geometry()),
      regions_(regions),
      noise_rng_(cfg.seed ^ kNoiseStream),
      trace_(trace) {
    cfg_.validate();
    if (starts.empty()) throw std::invalid_argument("no robot start");
    const bool noisy = cfg_.sensor.noise && cfg_.sensor.noise->enabled();
    if (!noisy) map_.init_observable_blocks(env_);
    graph_ = RcgGraph(Lattice{starts.front(), cfg_.w}, RcgGeometry{cfg_.w, 0.25 * cfg_.w, 5});
    graph_.set_regions(regions_);
    for (std::size_t k = 0; k < starts.size(); ++k) {
        RobotState r;
        r.index = static_cast<int>(k);
        r.pos = starts[k];
        r.rng = Rng(cfg_.seed + k);
        if (!regions_.empty()) {
            r.region = regions_.at(k);
            const int me = r.index;
            r.allow = [this, me](int id) { return graph_.node(id).region == me; };
        }
        robots_.push_back(std::move(r));
    }
}

void Coordinator::log(const char* kind, ordered_json payload, const RobotState* r, bool debug_only) {
    if (!trace_) return;
    const bool fleet = robots_.size() > 1;
    trace_->emit(r ? r->time : 0.0, kind, payload, (fleet && r) ? r->index : -1, debug_only);
}

long Coordinator::iteration_cap() const {
    if (cfg_.max_iterations > 0) return cfg_.max_iterations;
    const double area = env_.free_cell_count() * env_.geometry().resolution_m * env_.geometry().resolution_m;
    return std::max(100L, static_cast<long>(50.0 * area / (cfg_.w * cfg_.w)));
}

void Coordinator::sense_at(RobotState& r, Point p) {
    const bool noisy = cfg_.sensor.noise && cfg_.sensor.noise->enabled();
    const double res = env_.geometry().resolution_m;
    if (!noisy && !map_.observable_unknown_near(p, cfg_.sensor.detection_range_m + 2.0 * res)) return;
    // Under noise the planned path can graze a real obstacle; no scan there.
    if (!env_.is_free(p)) return;
    const SensorScan scan = sense(env_, RobotPose{p.x, p.y, 0.0}, cfg_.sensor, noisy ? &noise_rng_ : nullptr);
    const std::vector<int> cells = integrate_scan(map_, scan);
    discovered_.insert(discovered_.end(), cells.begin(), cells.end());
    log("sense", {{"at", pt(p)}, {"new_cells", cells.size()}}, &r, true);
}

void Coordinator::move_segment(RobotState& r, Point b, SegmentMode mode) {
    const Point a = r.pos;
    const double len = distance(a, b);
    if (len < 1e-12) return;
    const int n = std::max(1, static_cast<int>(std::ceil(len / (0.5 * cfg_.w) - 1e-9)));
    for (int s = 1; s <= n; ++s) {
        const Point p = s == n ? b : a + (b - a) * (static_cast<double>(s) / n);
        sense_at(r, p);
        update_retreat_set(graph_, r.retreat, p, -1, r.allow);
    }
    coverage_.mark(env_, a, b, cfg_.sensor.coverage_radius_m);
    r.pos = b;
    r.time += len / cfg_.speed;
    r.odometer += len;
    r.record.trajectory.push_back(b);
    r.record.times.push_back(r.time);
    r.record.segments.push_back({a, b, mode});
    log("move", {{"from", pt(a)}, {"to", pt(b)}, {"mode", segment_mode_name(mode)}}, &r);
}

double Coordinator::follow_nodes(RobotState& r, const std::vector<int>& path, SegmentMode mode) {
    const double before = r.odometer;
    for (std::size_t k = 1; k < path.size(); ++k) move_segment(r, graph_.position(path[k]), mode);
    if (!path.empty()) r.current = path.back();
    return r.odometer - before;
}

double Coordinator::follow_points(RobotState& r, const std::vector<Point>& pts, SegmentMode mode) {
    const double before = r.odometer;
    for (Point p : pts) move_segment(r, p, mode);
    return r.odometer - before;
}

std::vector<FrontierSample> Coordinator::sample_front(const SamplingFront& front) {
    const std::vector<Lap> laps = generate_laps(front, map_.geometry(), graph_.lattice());
    SamplingParams params;
    params.w = cfg_.w;
    params.clearance = 0.25 * cfg_.w;
    if (regions_.empty()) {
        return generate_frontier_samples(laps, map_, graph_.lattice(), params, cfg_.parallel);
    }
    std::vector<FrontierSample> out;
    for (std::size_t q = 0; q < regions_.size(); ++q) {
        params.region = regions_[q];
        for (const FrontierSample& s : generate_frontier_samples(laps, map_, graph_.lattice(), params, cfg_.parallel)) {
            int owner = -1;
            for (std::size_t o = 0; o < regions_.size(); ++o) {
                if (regions_[o].contains_closed(s.position)) {
                    owner = static_cast<int>(o);
                    break;
                }
            }
            if (owner == static_cast<int>(q)) out.push_back(s);
        }
    }
    std::sort(out.begin(), out.end(), [](const FrontierSample& a, const FrontierSample& b) {
        return a.lap_index != b.lap_index ? a.lap_index < b.lap_index : a.row_index < b.row_index;
    });
    return out;
}

std::vector<int> Coordinator::nodes_near_cells(const std::vector<int>& cells) const {
    std::vector<int> out;
    if (cells.empty()) return out;
    const GridGeometry& geo = map_.geometry();
    const double res = geo.resolution_m;
    const int block = std::max(1, static_cast<int>(std::lround(1.0 / res)));
    const int bnx = (geo.nx + block - 1) / block;
    const int bny = (geo.ny + block - 1) / block;
    std::vector<std::vector<int>> by_block(static_cast<std::size_t>(bnx) * bny);
    for (int idx : cells) by_block[(geo.row(idx) / block) * bnx + geo.col(idx) / block].push_back(idx);
    const double reach = std::sqrt(2.0) * cfg_.w;
    const double bsize = block * res;
    for (int id : graph_.alive_ids()) {
        const Point p = graph_.position(id);
        const int bi0 = std::max(0, static_cast<int>(std::floor((p.x - reach) / bsize)));
        const int bi1 = std::min(bnx - 1, static_cast<int>(std::floor((p.x + reach) / bsize)));
        const int bj0 = std::max(0, static_cast<int>(std::floor((p.y - reach) / bsize)));
        const int bj1 = std::min(bny - 1, static_cast<int>(std::floor((p.y + reach) / bsize)));
        bool near = false;
        for (int bj = bj0; bj <= bj1 && !near; ++bj) {
            for (int bi = bi0; bi <= bi1 && !near; ++bi) {
                for (int idx : by_block[bj * bnx + bi]) {
                    const Point lo{geo.col(idx) * res, geo.row(idx) * res};
                    if (point_rect_distance(p, lo, {lo.x + res, lo.y + res}) <= reach) {
                        near = true;
                        break;
                    }
                }
            }
        }
        if (near) out.push_back(id);
    }
    return out;
}

void Coordinator::grow() {
    std::sort(discovered_.begin(), discovered_.end());
    discovered_.erase(std::unique(discovered_.begin(), discovered_.end()), discovered_.end());

    const SamplingFront front = create_sampling_front(discovered_, map_, iteration_);
    std::vector<FrontierSample> samples = sample_front(front);
    if (!front.cells.empty() || !samples.empty()) {
        log("sample", {{"front_cells", front.cells.size()}, {"samples", samples.size()}}, &robots_.front());
    }
    samples.insert(samples.end(), pending_.begin(), pending_.end());

    const std::vector<int> near = nodes_near_cells(discovered_);
    std::vector<int> anchors;
    for (const RobotState& r : robots_) anchors.push_back(r.current);
    ExpandResult ex = expand(graph_, samples, map_, near, anchors);
    pending_ = ex.deferred;

    if (!regions_.empty()) {
        // Samples whose ball reaches across a seam between subregions.
        for (int id : ex.new_nodes) {
            const Point p = graph_.position(id);
            for (const Box& b : regions_) {
                if (!b.contains_closed(p)) continue;
                const double w = cfg_.w;
                const GridGeometry& geo = map_.geometry();
                const bool seam = (b.lo.x > 0.0 && p.x - b.lo.x <= w) || (b.hi.x < geo.width_m && b.hi.x - p.x <= w) ||
                                  (b.lo.y > 0.0 && p.y - b.lo.y <= w) || (b.hi.y < geo.height_m && b.hi.y - p.y <= w);
                if (seam) graph_.node_mut(id).partition_boundary = true;
                break;
            }
        }
    }
    if (!ex.new_nodes.empty() || ex.new_edges != 0) {
        log("expand",
            {{"new_nodes", ex.new_nodes.size()}, {"new_edges", ex.new_edges}, {"deferred", ex.deferred.size()}},
            &robots_.front());
    }

    std::set<int> cand(ex.new_nodes.begin(), ex.new_nodes.end());
    cand.insert(near.begin(), near.end());
    for (int id : state_changed_) {
        if (!graph_.alive(id)) continue;
        cand.insert(id);
        for (int m : graph_.node(id).adj) cand.insert(m);
    }
    // Nodes a robot stood on last time lose their protection now.
    for (int id : last_kept_) {
        if (graph_.alive(id)) cand.insert(id);
    }
    std::unordered_set<int> keep(pinned_.begin(), pinned_.end());
    for (const RobotState& r : robots_) {
        if (r.current >= 0) keep.insert(r.current);
    }
    last_kept_.assign(keep.begin(), keep.end());
    const EssentialContext ctx{&map_, &keep};
    const PruneReport pr = prune(graph_, std::vector<int>(cand.begin(), cand.end()), ctx);
    ++record_.prunes;
    if (pr.nodes_removed || pr.edges_removed || pr.links_removed || pr.retained) {
        log("prune",
            {{"nodes_removed", pr.nodes_removed},
             {"edges_removed", pr.edges_removed},
             {"links_removed", pr.links_removed},
             {"retained", pr.retained},
             {"nodes", graph_.node_count()},
             {"edges", graph_.edge_count()}},
            &robots_.front());
    }
    last_check_ms_ = 0.0;
    if (cfg_.check_invariants) {
        const double tc = now_ms();
        const InvariantReport rep = check_invariants(graph_, ctx, true);
        for (const std::string& v : rep.violations) {
            record_.invariant_violations.push_back("iteration " + std::to_string(iteration_) + ": " + v);
        }
        last_check_ms_ = now_ms() - tc;
    }
    // Nodes closed or pruned during this round leave every retreat set.
    for (RobotState& r : robots_) {
        std::erase_if(r.retreat, [&](int id) { return !graph_.alive(id) || graph_.state(id) != NodeState::Open; });
    }
    discovered_.clear();
    state_changed_.clear();
    ++iteration_;
}

void Coordinator::initialize() {
    for (RobotState& r : robots_) {
        r.record.trajectory.push_back(r.pos);
        r.record.times.push_back(0.0);
        coverage_.mark(env_, r.pos, r.pos, cfg_.sensor.coverage_radius_m);
        sense_at(r, r.pos);
        const Lattice& lat = graph_.lattice();
        const int k = lat.nearest_lap(r.pos.x);
        const int j = lat.nearest_row(r.pos.y);
        if (distance(lat.at(k, j), r.pos) > 1e-9) throw std::invalid_argument("robot start off the sample lattice");
        // The first sample sits at the start regardless of the ball test.
        const GridGeometry& geo = map_.geometry();
        const int cell = geo.cell_of(r.pos);
        if (cell >= 0 && map_.at(cell) == Cell::Free) map_.mark_sampled(cell);
        r.current = graph_.node_at(k, j) >= 0 ? graph_.node_at(k, j) : graph_.add_node(r.pos, k, j);
    }
    grow();
    for (RobotState& r : robots_) {
        update_retreat_set(graph_, r.retreat, r.pos, -1, r.allow);
    }
}

bool Coordinator::is_done(const RobotState& r) const { return r.done; }

TickPlan Coordinator::choose(RobotState& r) {
    TickPlan p;
    p.choice = select_goal_node(graph_, r.current, r.retreat, r.rng, r.allow);
    switch (p.choice.kind) {
        case GoalKind::Node:
            p.kind = PlanKind::Move;
            p.path = {r.current, p.choice.node};
            p.mode = SegmentMode::Coverage;
            r.record.goal_nodes.push_back(p.choice.node);
            log("goal",
                {{"node", p.choice.node},
                 {"dir", direction_name(p.choice.direction)},
                 {"at", pt(graph_.position(p.choice.node))}},
                &r);
            break;
        case GoalKind::DeadEnd: {
            ++r.record.dead_ends;
            log("deadend", {{"node", r.current}, {"retreat", r.retreat.size()}}, &r);
            EscapePlan esc = escape_dead_end(graph_, r.current, r.retreat);
            ++r.record.escapes;
            r.record.phase_breaks.push_back(static_cast<int>(r.record.goal_nodes.size()));
            log("escape", {{"goal", esc.goal}, {"cost", esc.cost}, {"path", esc.path}}, &r);
            p.kind = PlanKind::Move;
            p.path = std::move(esc.path);
            p.mode = SegmentMode::Escape;
            break;
        }
        case GoalKind::Complete: {
            // Open nodes the robot never came close to are reached directly.
            EscapePlan esc = nearest_matching(graph_, r.current, [&](int id) {
                return graph_.state(id) == NodeState::Open && (!r.allow || r.allow(id));
            });
            if (esc.goal < 0) {
                // The node under the robot is covered too.
                if (graph_.state(r.current) == NodeState::Open) {
                    graph_.set_state(r.current, NodeState::Closed);
                    state_changed_.insert(r.current);
                }
                p.kind = PlanKind::Done;
                return p;
            }
            ++r.record.fallbacks;
            ++r.record.escapes;
            r.record.phase_breaks.push_back(static_cast<int>(r.record.goal_nodes.size()));
            log("escape", {{"goal", esc.goal}, {"cost", esc.cost}, {"path", esc.path}, {"fallback", true}}, &r);
            p.kind = PlanKind::Move;
            p.path = std::move(esc.path);
            p.mode = SegmentMode::Escape;
            break;
        }
    }

    return p;
}

void Coordinator::commit(RobotState& r, TickPlan& p) {
    if (p.kind == PlanKind::Done) return;
    const StateUpdate su = update_state(graph_, r.current, p.choice);
    if (su.closed) state_changed_.insert(r.current);
    for (int id : su.links) state_changed_.insert(id);
    if (!su.links.empty()) log("goal", {{"node", p.path.back()}, {"links", su.links}}, &r, true);

    if (cfg_.enable_hole_prevention && p.kind == PlanKind::Move) {
        HoleParams hp;
        hp.max_nodes = cfg_.hole_max_nodes;
        hp.max_appended = cfg_.hole_max_appended;
        hp.coverage = &coverage_;
        hp.sample_clearance = 0.25;
        const int goal = p.path.back();
        const std::vector<CoverageHole> holes = detect_coverage_holes(graph_, r.current, goal, map_, hp, r.allow);
        if (!holes.empty()) {
            for (const CoverageHole& h : holes) {
                ++r.record.holes;
                ordered_json extra = ordered_json::array();
                for (Point q : h.appended) extra.push_back(pt(q));
                log("hole", {{"label", h.label}, {"nodes", h.nodes}, {"appended", extra}}, &r);
            }
            const double t0 = now_ms();
            p.tour = compute_tsp_trajectory(holes, r.current, goal, graph_, map_);
            last_tsp_ms_ = now_ms() - t0;
            record_.tsp_ms.push_back(last_tsp_ms_ / static_cast<double>(holes.size()));
            ordered_json stops = ordered_json::array();
            for (const TourWaypoint& wp : p.tour.waypoints) {
                if (wp.stop) stops.push_back(pt(wp.position));
            }
            log("tsp",
                {{"end", tour_end_name(p.tour.end_rule)},
                 {"end_node", p.tour.end_node},
                 {"cost", p.tour.cost},
                 {"appended", p.tour.appended},
                 {"stops", stops}},
                &r);
            p.kind = PlanKind::Tour;
            p.holes = holes;
        }
    }
}

TickPlan Coordinator::plan(RobotState& r) {
    TickPlan p = choose(r);
    commit(r, p);
    return p;
}

double Coordinator::execute_tour(RobotState& r, const TickPlan& p) {
    const double before = r.odometer;
    for (std::size_t k = 1; k < p.tour.waypoints.size(); ++k) move_segment(r, p.tour.waypoints[k].position, SegmentMode::Tsp);
    for (int id : p.tour.hole_nodes) {
        if (graph_.alive(id) && graph_.state(id) == NodeState::Open) {
            graph_.set_state(id, NodeState::Closed);
            state_changed_.insert(id);
        }
    }
    r.current = p.tour.end_node;
    ++r.record.tours;
    r.record.phase_breaks.push_back(static_cast<int>(r.record.goal_nodes.size()));
    return r.odometer - before;
}

double Coordinator::execute(RobotState& r, const TickPlan& p) {
    if (p.kind == PlanKind::Tour) return execute_tour(r, p);
    if (p.kind == PlanKind::Move) return follow_nodes(r, p.path, p.mode);
    return 0.0;
}

double Coordinator::plan_length(const TickPlan& p) const {
    double len = 0.0;
    if (p.kind == PlanKind::Tour) {
        for (std::size_t k = 1; k < p.tour.waypoints.size(); ++k) {
            len += distance(p.tour.waypoints[k - 1].position, p.tour.waypoints[k].position);
        }
    } else if (p.kind == PlanKind::Move) {
        for (std::size_t k = 1; k < p.path.size(); ++k) {
            len += distance(graph_.position(p.path[k - 1]), graph_.position(p.path[k]));
        }
    }
    return len;
}

bool Coordinator::tick(RobotState& r) {
    if (r.done) return false;
    const double t0 = now_ms();
    last_tsp_ms_ = 0.0;
    TickPlan p = plan(r);
    const double plan_ms = now_ms() - t0 - last_tsp_ms_;
    if (p.kind == PlanKind::Done) {
        r.done = true;
        r.record.complete = true;
        return false;
    }
    execute(r, p);
    const double t1 = now_ms();
    grow();
    record_.iteration_ms.push_back(plan_ms + (now_ms() - t1) - last_check_ms_);
    ++record_.iterations;
    return true;
}

// ---------------------------------------------------------------------------
// Episodes

EpisodeRecord run_episode(const Environment& env, Point start, const EpisodeConfig& cfg, TraceLog* trace) {
    Coordinator c(env, cfg, {start}, {}, trace);
    EpisodeRecord& rec = c.record();
    try {
        c.initialize();
        RobotState& r = c.robots().front();
        const long cap = c.iteration_cap();
        while (c.tick(r)) {
            if (rec.iterations >= cap) {
                rec.error = "max_iterations exceeded";
                break;
            }
        }
    } catch (const std::logic_error& e) {
        rec.error = e.what();
    }
    return finalize_episode(c, trace);
}

EpisodeRecord finalize_episode(Coordinator& c, TraceLog* trace) {
    EpisodeRecord& rec = c.record();
    rec.robots.clear();
    bool all = true;
    for (const RobotState& r : c.robots()) {
        rec.robots.push_back(r.record);
        all = all && r.record.complete;
    }
    rec.completed = rec.error.empty() && all;
    rec.final_graph_json = c.graph().to_json();
    rec.covered = c.coverage().data();
    c.log("done",
          {{"completed", rec.completed},
           {"iterations", rec.iterations},
           {"coverage_ratio", coverage_ratio(c.env(), rec.covered)},
           {"error", rec.error},
           {"graph", ordered_json::parse(rec.final_graph_json)}},
          &c.robots().front());
    if (trace) rec.trace = trace->lines();
    return std::move(rec);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(values.size() - 1, lo + 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - lo);
}

namespace {

double one_run(const Environment& env, Point start, const EpisodeConfig& base, const MonteCarloConfig& mc,
               double sigma, int run) {
    EpisodeConfig cfg = base;
    cfg.seed = base.seed + static_cast<std::uint64_t>(run);
    cfg.check_invariants = false;
    cfg.parallel = false;
    if (sigma > 0.0) {
        cfg.sensor.noise = NoiseConfig{mc.sigma_laser, mc.sigma_compass, sigma};
    } else {
        cfg.sensor.noise.reset();
    }
    const EpisodeRecord rec = run_episode(env, start, cfg);
    return coverage_ratio(env, rec.covered, 1.0, false);
}

std::vector<MonteCarloRow> summarize(const MonteCarloConfig& mc, const std::vector<double>& flat) {
    std::vector<MonteCarloRow> rows;
    for (std::size_t l = 0; l < mc.sigma_loc.size(); ++l) {
        MonteCarloRow row;
        row.sigma_loc = mc.sigma_loc[l];
        row.runs = mc.runs;
        row.values.assign(flat.begin() + l * mc.runs, flat.begin() + (l + 1) * mc.runs);
        row.min = quantile(row.values, 0.0);
        row.q1 = quantile(row.values, 0.25);
        row.median = quantile(row.values, 0.5);
        row.q3 = quantile(row.values, 0.75);
        row.max = quantile(row.values, 1.0);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::vector<MonteCarloRow> run_monte_carlo_serial(const Environment& env, Point start, const EpisodeConfig& cfg,
                                                  const MonteCarloConfig& mc) {
    if (mc.runs < 1) throw std::invalid_argument("runs must be at least 1");
    std::vector<double> flat(mc.sigma_loc.size() * mc.runs);
    for (std::size_t k = 0; k < flat.size(); ++k) {
        flat[k] = one_run(env, start, cfg, mc, mc.sigma_loc[k / mc.runs], static_cast<int>(k % mc.runs));
    }
    return summarize(mc, flat);
}

std::vector<MonteCarloRow> run_monte_carlo(const Environment& env, Point start, const EpisodeConfig& cfg,
                                           const MonteCarloConfig& mc) {
    if (mc.runs < 1) throw std::invalid_argument("runs must be at least 1");
    const long total = static_cast<long>(mc.sigma_loc.size()) * mc.runs;
    std::vector<double> flat(total);
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < total; ++k) {
        flat[k] = one_run(env, start, cfg, mc, mc.sigma_loc[k / mc.runs], static_cast<int>(k % mc.runs));
    }
    return summarize(mc, flat);
}

}  // namespace cstar
