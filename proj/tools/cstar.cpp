// Command-line front end: run an episode (single, energy, fleet, Monte Carlo)
// or validate a scenario.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cstar/engine.hpp"
#include "cstar/missions.hpp"
#include "cstar/scenario.hpp"
#include "cstar/svg.hpp"

namespace fs = std::filesystem;
using namespace cstar;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kMalformed = 2;
constexpr int kInfeasible = 3;

struct Options {
    std::string scenario;
    std::string mode{"single"};
    double w{1.0};
    double rc{0.5};
    double rd{15.0};
    double speed{0.5};
    std::uint64_t seed{0};
    double energy_capacity{360.0};
    int robots{4};
    double noise_laser{0.0};
    double noise_compass_deg{0.0};
    std::string noise_loc;
    int runs{10};
    std::string out{"out"};
    bool no_hole_prevention{false};
};

/// "a:b:n" (n evenly spaced values), "a,b,c" or a single value.
std::vector<double> parse_levels(const std::string& text) {
    std::vector<double> out;
    if (text.empty()) return out;
    if (text.find(':') != std::string::npos) {
        double a = 0.0, b = 0.0;
        int n = 0;
        char c1 = 0, c2 = 0;
        std::istringstream in(text);
        if (!(in >> a >> c1 >> b >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1) {
            throw CLI::ValidationError("--noise-loc", "expected a:b:n");
        }
        for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
        return out;
    }
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
    return out;
}

EpisodeConfig episode_config(const Options& o) {
    EpisodeConfig cfg;
    cfg.w = o.w;
    cfg.speed = o.speed;
    cfg.seed = o.seed;
    cfg.enable_hole_prevention = !o.no_hole_prevention;
    cfg.sensor.coverage_radius_m = o.rc;
    cfg.sensor.detection_range_m = o.rd;
    const std::vector<double> loc = parse_levels(o.noise_loc);
    NoiseConfig noise{o.noise_laser, o.noise_compass_deg * 3.14159265358979323846 / 180.0,
                      loc.empty() ? 0.0 : loc.front()};
    if (noise.enabled()) cfg.sensor.noise = noise;
    return cfg;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << text;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string s;
    for (const std::string& l : lines) {
        s += l;
        s += '\n';
    }
    return s;
}

std::string metrics_row(const std::string& name, std::uint64_t seed, const Metrics& m) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%llu,%.3f,%d,%.3f,%.3f,%.3f\n", name.c_str(),
                  static_cast<unsigned long long>(seed), m.CT, m.NT, m.TL, m.OR, m.coverage_ratio);
    return buf;
}

const char* kMetricsHeader = "scenario,seed,CT,NT,TL,OR,coverage_ratio\n";

void write_outputs(const fs::path& dir, const Scenario& sc, const std::vector<std::string>& trace,
                   const std::string& metrics) {
    write_file(dir / "trace.jsonl", join_lines(trace));
    write_file(dir / "metrics.csv", std::string(kMetricsHeader) + metrics);
    write_file(dir / "final.svg", render_svg(sc, trace));
}

int finish(const EpisodeRecord& rec, bool infeasible) {
    if (infeasible) {
        std::cerr << "infeasible: " << rec.error << '\n';
        return kInfeasible;
    }
    if (!rec.error.empty()) {
        std::cerr << "error: " << rec.error << '\n';
        return kFailed;
    }
    return kOk;
}

int run_single(const Options& o, const Scenario& sc, const Environment& env, const fs::path& dir) {
    const EpisodeConfig cfg = episode_config(o);
    TraceLog trace;
    const EpisodeRecord rec = run_episode(env, sc.start, cfg, &trace);
    const Metrics m = compute_metrics(rec.robots.front().trajectory, env, rec.covered, cfg.speed, cfg.turn_penalty_s);
    write_outputs(dir, sc, rec.trace, metrics_row(sc.name, o.seed, m));
    std::printf("coverage_ratio %.3f  TL %.1f  NT %d  iterations %d\n", m.coverage_ratio, m.TL, m.NT, rec.iterations);
    return finish(rec, false);
}

int run_energy(const Options& o, const Scenario& sc, const Environment& env, const fs::path& dir) {
    const EpisodeConfig cfg = episode_config(o);
    EnergyConfig ec;
    ec.capacity = o.energy_capacity;
    TraceLog trace;
    const EnergyMissionRecord mr = run_energy_mission(env, sc.start, cfg, ec, &trace);
    const EpisodeRecord& rec = mr.episode;
    const Metrics m = compute_metrics(rec.robots.front().trajectory, env, rec.covered, cfg.speed, cfg.turn_penalty_s);
    write_outputs(dir, sc, rec.trace, metrics_row(sc.name, o.seed, m));
    std::string cycles = "cycle,advance_len,coverage_len,retreat_len,energy_used\n";
    for (const CycleRecord& c : mr.cycles) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%.3f,%.3f,%.3f,%.3f\n", c.index, c.advance_len, c.coverage_len,
                      c.retreat_len, c.energy_used);
        cycles += buf;
    }
    write_file(dir / "cycles.csv", cycles);
    std::printf("coverage_ratio %.3f  cycles %zu  min margin %.3f\n", m.coverage_ratio, mr.cycles.size(),
                mr.min_margin);
    return finish(rec, mr.infeasible);
}

int run_fleet_mode(const Options& o, const Scenario& sc, const Environment& env, const fs::path& dir) {
    const EpisodeConfig cfg = episode_config(o);
    const FleetConfig fleet = grid_fleet(env, o.robots, o.w);
    TraceLog trace;
    const FleetRecord fr = run_fleet(env, fleet, cfg, &trace);
    const EpisodeRecord& rec = fr.episode;
    std::string rows;
    Metrics total;
    std::vector<std::vector<Point>> all;
    for (std::size_t k = 0; k < rec.robots.size(); ++k) {
        const auto& traj = rec.robots[k].trajectory;
        const Metrics m = compute_metrics(traj, env, rec.covered, cfg.speed, cfg.turn_penalty_s);
        rows += metrics_row(sc.name + "/robot" + std::to_string(k), o.seed, m);
        total.CT = std::max(total.CT, m.CT);
        total.NT += m.NT;
        total.TL += m.TL;
        all.push_back(traj);
    }
    total.OR = overlap_rate(env, all);
    total.coverage_ratio = coverage_ratio(env, rec.covered);
    rows += metrics_row(sc.name, o.seed, total);
    write_outputs(dir, sc, rec.trace, rows);
    std::printf("coverage_ratio %.3f  robots %zu\n", total.coverage_ratio, rec.robots.size());
    for (std::size_t q = 0; q < fr.region_coverage.size(); ++q) {
        if (!fr.region_complete[q]) std::printf("region %zu incomplete: %.3f%%\n", q, fr.region_coverage[q]);
    }
    return finish(rec, false);
}

int run_montecarlo(const Options& o, const Scenario& sc, const Environment& env, const fs::path& dir) {
    Options base = o;
    base.noise_loc.clear();
    EpisodeConfig cfg = episode_config(base);
    MonteCarloConfig mc;
    mc.sigma_loc = parse_levels(o.noise_loc.empty() ? "0,0.02,0.12" : o.noise_loc);
    mc.runs = o.runs;
    if (o.noise_laser > 0.0) mc.sigma_laser = o.noise_laser;
    if (o.noise_compass_deg > 0.0) mc.sigma_compass = o.noise_compass_deg * 3.14159265358979323846 / 180.0;
    const std::vector<MonteCarloRow> rows = run_monte_carlo(env, sc.start, cfg, mc);
    std::string csv = "sigma_loc,runs,min,q1,median,q3,max,values\n";
    for (const MonteCarloRow& r : rows) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%.4f,%d,%.3f,%.3f,%.3f,%.3f,%.3f,", r.sigma_loc, r.runs, r.min, r.q1,
                      r.median, r.q3, r.max);
        csv += buf;
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%s%.3f", k ? ";" : "", r.values[k]);
            csv += buf;
        }
        csv += '\n';
        std::printf("sigma %.3f  median %.3f  [%.3f, %.3f]\n", r.sigma_loc, r.median, r.min, r.max);
    }
    write_file(dir / "montecarlo.csv", csv);
    return kOk;
}

/// Loads and rasterises; prints diagnostics and returns a nonzero exit code on failure.
int load(const std::string& path, Scenario& sc, Environment& env) {
    try {
        sc = load_scenario(path);
        env = rasterize(sc);
    } catch (const ScenarioError& e) {
        std::cerr << path << ':' << e.line() << ':' << e.column() << ": " << e.what() << '\n';
        return kMalformed;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online coverage path planner on a simulated 2D world"};
    app.require_subcommand(1);
    Options o;

    CLI::App* run = app.add_subcommand("run", "Run a coverage episode and write trace, metrics and SVG");
    run->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    run->add_option("--mode", o.mode, "single | energy | fleet | montecarlo")
        ->check(CLI::IsMember({"single", "energy", "fleet", "montecarlo"}));
    run->add_option("--w", o.w, "Lap spacing / sampling resolution (m)")->check(CLI::PositiveNumber);
    run->add_option("--rc", o.rc, "Coverage radius (m)")->check(CLI::PositiveNumber);
    run->add_option("--rd", o.rd, "Detection range (m)")->check(CLI::PositiveNumber);
    run->add_option("--speed", o.speed, "Robot speed (m/s)")->check(CLI::PositiveNumber);
    run->add_option("--seed", o.seed, "Seed for every random choice");
    run->add_option("--energy-capacity", o.energy_capacity, "Battery capacity (units, 1 per metre)")
        ->check(CLI::PositiveNumber);
    run->add_option("--robots", o.robots, "Fleet size")->check(CLI::PositiveNumber);
    run->add_option("--noise-laser", o.noise_laser, "Range noise sigma (m)")->check(CLI::NonNegativeNumber);
    run->add_option("--noise-compass", o.noise_compass_deg, "Heading noise sigma (deg)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--noise-loc", o.noise_loc, "Localisation sigma: value, list a,b,c or range a:b:n");
    run->add_option("--runs", o.runs, "Monte Carlo runs per level")->check(CLI::PositiveNumber);
    run->add_option("--out", o.out, "Output directory");
    run->add_flag("--no-hole-prevention", o.no_hole_prevention, "Disable coverage-hole repair");

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario for feasibility");
    validate->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    validate->add_option("--w", o.w, "Lap spacing (m)")->check(CLI::PositiveNumber);
    validate->add_option("--rc", o.rc, "Coverage radius (m)")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Scenario sc;
    Environment env;
    if (!fs::exists(o.scenario)) {
        std::cerr << o.scenario << ": no such file\n";
        return kMalformed;
    }
    if (const int rc = load(o.scenario, sc, env); rc != kOk) return rc;

    const ValidationReport rep = validate_scenario(sc, env, o.w, o.rc);
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << '\n';
    if (validate->parsed()) {
        for (const std::string& e : rep.errors) std::cerr << "error: " << e << '\n';
        if (!rep.feasible) return kInfeasible;
        std::printf("OK\n");
        return kOk;
    }
    if (!rep.feasible && !(o.mode == "fleet" && env.free_space_connected())) {
        for (const std::string& e : rep.errors) std::cerr << "infeasible: " << e << '\n';
        return kInfeasible;
    }

    try {
        const fs::path dir(o.out);
        fs::create_directories(dir);
        if (o.mode == "energy") return run_energy(o, sc, env, dir);
        if (o.mode == "fleet") return run_fleet_mode(o, sc, env, dir);
        if (o.mode == "montecarlo") return run_montecarlo(o, sc, env, dir);
        return run_single(o, sc, env, dir);
    } catch (const InfeasibleMission& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kMalformed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailed;
    }
}
