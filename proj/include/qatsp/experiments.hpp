#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qatsp/subtour_loop.hpp"

namespace qatsp {

struct EnsembleSpec {
    int n = 12;
    int count = 100;
    std::uint64_t master_seed = 0;
};

// Seeded, reproducible experiment output: per-instance rows (already
// stringified at full precision, so CSV bytes are stable) plus summary
// statistics recomputable from the rows. Instance k of an ensemble uses seed
// master_seed + k.
struct ExperimentReport {
    std::string id;
    EnsembleSpec ensemble;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::json summary;
    std::string tool_version;
    std::string command_line;
    double wall_seconds = 0.0;
};

// Fraction of instances whose minimum cycle cover splits into subtours, with
// the subtour-size histogram.
ExperimentReport exp_subtour_fraction(int n, int count, std::uint64_t seed, int jobs = 1);

// Distribution of ground-truth required connections over all ground-state
// subtours of the ensemble.
ExperimentReport exp_ground_connection_distribution(int n, int count, std::uint64_t seed,
                                                    int jobs = 1);

// Success/optimality rates of the iterative algorithm per inner solver
// setting; mcs_grid applies to heuristic solvers only.
ExperimentReport exp_iterative_success(int n, int count, InnerSolver solver, int C,
                                       const std::vector<long long>& mcs_grid,
                                       std::uint64_t seed, int jobs = 1,
                                       int max_iterations = 8);

// Required-connections histograms of subtours found by the SA inner solver
// at each MCS (plus the exact solver as reference), at the given iterations.
ExperimentReport exp_connection_histograms_by_mcs(int n, int count,
                                                  const std::vector<long long>& mcs_grid,
                                                  const std::vector<int>& iterations,
                                                  std::uint64_t seed, int jobs = 1);

// Neighbor-rank histogram of optimal-tour edges with an exponential-decay
// slope fit and L-truncation coverage for L = 3..8.
ExperimentReport exp_edge_rank_decay(const std::vector<int>& ns, int count, std::uint64_t seed,
                                     int jobs = 1);

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);
void write_report_json(const ExperimentReport& report, const std::filesystem::path& path);
ExperimentReport load_report_json(const std::filesystem::path& path);
void print_summary(const ExperimentReport& report, std::ostream& out);

// Runs fn(0..count-1) on `jobs` threads; any exception is rethrown.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

} // namespace qatsp
