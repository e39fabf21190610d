#pragma once

#include <vector>

// Small tour problems for hole repair: nearest-neighbour construction followed
// by first-improvement 2-opt.
namespace cstar {

/// Symmetric cost table over real stops. `start` is where the tour begins.
/// `end` == start asks for a closed loop, another index fixes the last stop,
/// and -1 leaves the last stop free. Non-finite entries mean "no connection".
struct TspInstance {
    std::vector<std::vector<double>> cost;
    int start{0};
    int end{0};
};

struct TspResult {
    /// Stops in visiting order, beginning with start. A closed loop repeats
    /// start at the back.
    std::vector<int> order;
    double cost{0.0};
    double construction_cost{0.0};
    /// Tour cost after construction and after every accepted move; strictly
    /// decreasing.
    std::vector<double> history;
    int sweeps{0};
};

struct TspOptions {
    int max_sweeps{50};
    /// Run the construction from every stop and keep the best improved tour.
    bool multi_start{true};
};

TspResult solve_tsp(const TspInstance& inst, const TspOptions& opt = {});

/// Cost of visiting `order` under the instance (closed loops include the
/// return leg because start is repeated).
double path_cost(const TspInstance& inst, const std::vector<int>& order);

}  // namespace cstar
