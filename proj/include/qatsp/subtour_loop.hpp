#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qatsp/encoding.hpp"
#include "qatsp/instance.hpp"
#include "qatsp/oracles.hpp"
#include "qatsp/solvers.hpp"

namespace qatsp {

// Cycle decomposition of the selected edge set, or a report of the degree
// violations. A single valid tour comes back as a one-cycle cover.
std::variant<CycleCover, ViolationReport> detect_subtours(const std::vector<std::uint8_t>& config,
                                                          const VariableMap& varmap,
                                                          const TspInstance& inst);

enum class InnerSolver { exact, sa, sqa };

struct LoopPolicy {
    int C = 2;                      // quadratic subtour penalty target
    double escalation_factor = 1.0; // grows eta/eta' per iteration (use 2 with C=3)
    int max_iterations = 10;
    InnerSolver solver = InnerSolver::exact;
    AnnealSchedule schedule;            // heuristic inner solvers
    bool constraints_per_round_all = true; // false: one constraint per round
    bool use_slack = false;                // slack-variable penalties instead of fixed C
    std::optional<int> truncation;         // L for the edge encoding
    std::optional<PenaltyWeights> weights; // defaults_for(inst) if unset
};

struct IterationLog {
    int iteration = 0; // 1-based
    double best_energy = 0.0;
    std::vector<std::uint8_t> config;
    DecodeResult decoded;
    std::vector<std::vector<int>> constraints_added; // canonical subsets
    int C_used = 2;
    double eta_prime_used = 0.0;
    double cumulative_seconds = 0.0;
};

struct LoopResult {
    bool success = false;
    std::optional<Tour> tour;
    std::vector<IterationLog> logs;
    std::string failure_reason;
};

// The iterative algorithm: anneal the minimally constrained edge model,
// detect subtours, penalize each one, repeat until a single tour emerges or
// the iteration budget runs out. Constraint subsets are deduplicated with
// complements identified (canonical side: the one without city 0). Heuristic
// degree violations trigger up to 3 re-anneals with doubled eta before the
// loop gives up.
LoopResult iterate_solve(const TspInstance& inst, const LoopPolicy& policy, std::uint64_t seed);

// One subtour constraint for the exact inner solver.
struct CutConstraint {
    std::vector<int> subset; // sorted
    int C = 2;
    double eta_prime = 0.0;
    bool slack = false;
    double eta_double_prime = 0.0;
};

// Exact minimizer of   total edge weight + sum_t penalty_t(cut_t)   over all
// cycle covers on the retained edge set (branch and bound over anchored
// cycles; admissible bounds, so the result is exact). This is the MIQP
// ground truth the loop uses as its exact inner solver: degree-2 held hard,
// subtour penalties soft.
CycleCover constrained_min_cycle_cover(const TspInstance& inst,
                                       const std::vector<CutConstraint>& constraints,
                                       const VariableMap* edge_map = nullptr);

// Ground-truth required connections (via connection_stats against the
// optimal tour) of every subtour found at `iteration` across an ensemble,
// binned by connection count.
std::map<int, long long> required_connections_histogram(
    const std::vector<std::pair<const TspInstance*, const LoopResult*>>& ensemble, int iteration);

} // namespace qatsp
