#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qatsp/instance.hpp"
#include "qatsp/quadratic_model.hpp"

namespace qatsp {

// Discretized annealing schedule shared by SA and SQA. Zero-valued fields are
// resolved to scale-aware defaults against the model being solved:
//   t0 = max_i (|linear_i| + sum_j |quadratic_ij|)   (max local field)
//   tf = 1e-3 * t0, geometric interpolation
//   gamma0 = 3 * t0, gammaf = 1e-4 * t0, linear interpolation
//   beta = 64 / t0
struct AnnealSchedule {
    long long total_sweeps = 10000;
    double t0 = 0.0;
    double tf = 0.0;
    double gamma0 = 0.0;
    double gammaf = 0.0;
    int trotter_slices = 32;
    double beta = 0.0;
    bool record_trace = false;
};

struct SolveResult {
    std::vector<std::uint8_t> best_config;
    double best_energy = 0.0;
    std::vector<double> energy_trace; // best-so-far per sweep, if recorded
    std::uint64_t seed = 0;
    long long sweeps_used = 0;
    // diagnostics
    double acceptance_rate = 0.0;
    double final_slice_overlap = 0.0; // SQA only: mean inter-slice sigma sigma
};

double default_t0(const QuadraticModel& model);

// Called after every sweep with (sweep index, current configuration).
using SweepObserver = std::function<void(long long, const std::vector<std::uint8_t>&)>;

// Single-spin-flip Metropolis with sequential proposal order and geometric
// temperature interpolation; returns the best configuration ever visited.
// Deterministic for fixed (model, schedule, seed).
SolveResult simulated_annealing(const QuadraticModel& model, const AnnealSchedule& schedule,
                                std::uint64_t seed, const SweepObserver& observer = {});

// Path-integral Monte Carlo over P coupled replicas of the Ising form of the
// model. The inter-slice ferromagnetic coupling is
//   J_perp(Gamma) = -(P / (2 beta)) * ln tanh(beta Gamma / P)
// with Gamma clamped at 1e-12 * gamma0 to avoid tanh underflow. Gamma anneals
// linearly from gamma0 to gammaf while the problem couplings ramp in
// linearly. Returns the best single-slice configuration by model energy.
SolveResult simulated_quantum_annealing(const QuadraticModel& model,
                                        const AnnealSchedule& schedule, std::uint64_t seed);

// Random-restart steepest-descent 2-opt. Requires n >= 4.
Tour two_opt_baseline(const TspInstance& inst, std::uint64_t seed, int restarts = 20);

} // namespace qatsp
