#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qatsp/instance.hpp"
#include "qatsp/quadratic_model.hpp"

namespace qatsp {

// Exact minimum-length tour via Held-Karp subset DP, n <= 20. Ties are broken
// toward the lexicographically smallest optimal order starting at city 0.
Tour optimal_tour(const TspInstance& inst);

// Partition of all cities into cycles of length >= 3 (a 2-factor without
// doubled edges). Cycles are stored canonically: each starts at its smallest
// city with the smaller neighbor second, and cycles are sorted by first city.
struct CycleCover {
    std::vector<std::vector<int>> cycles;
    double total_weight = 0.0;

    bool single_cycle() const { return cycles.size() == 1; }
    static CycleCover from_cycles(std::vector<std::vector<int>> cycles, const TspInstance& inst);
};

// Exact minimum-weight cycle cover via subset DP, n <= 14. This is the ground
// state of the edge mapping with its degree-2 constraints for large eta.
CycleCover min_cycle_cover(const TspInstance& inst);

// For one subtour subset: how many optimal-tour edges cross the cut between
// the subset and its complement. Even and >= 2 for any proper subset.
struct ConnectionStat {
    std::vector<int> subset;
    int required_connections = 0;
};

// One stat per cycle of `cover`, against optimal_tour(inst). Empty for a
// single-cycle cover.
std::vector<ConnectionStat> connection_stats(const TspInstance& inst, const CycleCover& cover);

// Crossing-edge count of `order` (cyclic) over the cut (subset, complement).
int cut_crossings(const std::vector<int>& order, const std::vector<int>& subset, int n);

// Global minimum of a quadratic model by full enumeration, <= 26 variables.
// Energy ties are broken toward the lexicographically smallest configuration
// (config[0] most significant).
std::pair<std::vector<std::uint8_t>, double> exhaustive_ground_state(const QuadraticModel& model);

} // namespace qatsp
