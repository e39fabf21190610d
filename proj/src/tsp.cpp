#include "cstar/tsp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cstar {
namespace {

// Lexicographic cost: number of unconnected legs first, then length.
struct Cost {
    int missing{0};
    double length{0.0};

    Cost operator+(const Cost& o) const { return {missing + o.missing, length + o.length}; }
    Cost operator-(const Cost& o) const { return {missing - o.missing, length - o.length}; }
    bool operator<(const Cost& o) const {
        if (missing != o.missing) return missing < o.missing;
        return length < o.length - 1e-12;
    }
    double flat() const { return length + 1e12 * missing; }
};

struct Table {
    int n{0};       // real stops
    int m{0};       // stops incl. the dummy
    int dummy{-1};
    std::vector<Cost> c;

    const Cost& at(int a, int b) const { return c[static_cast<std::size_t>(a) * m + b]; }
};

Table build_table(const TspInstance& inst) {
    Table t;
    t.n = static_cast<int>(inst.cost.size());
    const bool closed = inst.end == inst.start;
    t.m = closed ? t.n : t.n + 1;
    t.dummy = closed ? -1 : t.n;
    t.c.assign(static_cast<std::size_t>(t.m) * t.m, Cost{});
    for (int a = 0; a < t.n; ++a) {
        for (int b = 0; b < t.n; ++b) {
            const double v = inst.cost[a][b];
            t.c[static_cast<std::size_t>(a) * t.m + b] = std::isfinite(v) ? Cost{0, v} : Cost{1, 0.0};
        }
    }
    if (!closed) {
        // The dummy stop joins the start for free; it joins the fixed end for
        // free too, everything else is unconnected.
        for (int a = 0; a < t.n; ++a) {
            const bool free_leg = a == inst.start || a == inst.end;
            const Cost v = free_leg ? Cost{0, 0.0} : Cost{1, 0.0};
            t.c[static_cast<std::size_t>(a) * t.m + t.dummy] = v;
            t.c[static_cast<std::size_t>(t.dummy) * t.m + a] = v;
        }
    }
    return t;
}

Cost cycle_cost(const Table& t, const std::vector<int>& cyc) {
    Cost total;
    for (std::size_t k = 0; k < cyc.size(); ++k) total = total + t.at(cyc[k], cyc[(k + 1) % cyc.size()]);
    return total;
}

std::vector<int> nearest_neighbour(const Table& t, int seed) {
    std::vector<int> cyc{seed};
    std::vector<char> used(t.m, 0);
    used[seed] = 1;
    while (static_cast<int>(cyc.size()) < t.m) {
        const int cur = cyc.back();
        int best = -1;
        for (int b = 0; b < t.m; ++b) {
            if (used[b]) continue;
            if (best < 0 || t.at(cur, b) < t.at(cur, best)) best = b;
        }
        used[best] = 1;
        cyc.push_back(best);
    }
    return cyc;
}

// First-improvement 2-opt; returns the number of sweeps run.
int two_opt(const Table& t, std::vector<int>& cyc, int max_sweeps, std::vector<double>& history) {
    const int m = static_cast<int>(cyc.size());
    Cost current = cycle_cost(t, cyc);
    int sweeps = 0;
    if (m < 4) return sweeps;
    bool improved = true;
    while (improved && sweeps < max_sweeps) {
        improved = false;
        ++sweeps;
        for (int i = 0; i < m - 2; ++i) {
            for (int j = i + 2; j < m; ++j) {
                if (i == 0 && j == m - 1) continue;
                const int a = cyc[i];
                const int b = cyc[i + 1];
                const int c = cyc[j];
                const int d = cyc[(j + 1) % m];
                const Cost before = t.at(a, b) + t.at(c, d);
                const Cost after = t.at(a, c) + t.at(b, d);
                if (after < before) {
                    std::reverse(cyc.begin() + i + 1, cyc.begin() + j + 1);
                    current = current - before + after;
                    history.push_back(current.flat());
                    improved = true;
                }
            }
        }
    }
    return sweeps;
}

}  // namespace

double path_cost(const TspInstance& inst, const std::vector<int>& order) {
    double total = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) total += inst.cost[order[k - 1]][order[k]];
    return total;
}

TspResult solve_tsp(const TspInstance& inst, const TspOptions& opt) {
    const int n = static_cast<int>(inst.cost.size());
    if (n == 0 || inst.start < 0 || inst.start >= n || inst.end >= n || inst.end < -1) {
        throw std::invalid_argument("bad tour instance");
    }
    TspResult res;
    if (n == 1) {
        res.order = {inst.start};
        if (inst.end == inst.start) res.order.push_back(inst.start);
        res.history = {0.0};
        return res;
    }
    const Table t = build_table(inst);

    std::vector<int> best;
    Cost best_cost;
    std::vector<double> best_history;
    double best_construction = 0.0;
    const int seeds = opt.multi_start ? t.m : 1;
    for (int s = 0; s < seeds; ++s) {
        std::vector<int> cyc = nearest_neighbour(t, opt.multi_start ? s : inst.start);
        std::vector<double> history{cycle_cost(t, cyc).flat()};
        const double construction = history.front();
        const int sweeps = two_opt(t, cyc, opt.max_sweeps, history);
        const Cost c = cycle_cost(t, cyc);
        if (best.empty() || c < best_cost) {
            best = cyc;
            best_cost = c;
            best_history = std::move(history);
            best_construction = construction;
            res.sweeps = sweeps;
        }
    }

    // Unroll the cycle into a tour from start, walking away from the dummy.
    const int m = t.m;
    const int pos = static_cast<int>(std::find(best.begin(), best.end(), inst.start) - best.begin());
    int step = 1;
    if (t.dummy >= 0 && best[(pos + 1) % m] == t.dummy) step = -1;
    for (int k = 0; k < m; ++k) {
        const int v = best[((pos + step * k) % m + m) % m];
        if (v == t.dummy) break;
        res.order.push_back(v);
    }
    if (inst.end == inst.start) res.order.push_back(inst.start);
    res.cost = path_cost(inst, res.order);
    res.construction_cost = best_construction;
    res.history = std::move(best_history);
    return res;
}

}  // namespace cstar
