#include "qatsp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qatsp/encoding.hpp"
#include "qatsp/rng.hpp"

namespace qatsp {

double default_t0(const QuadraticModel& model) {
    double t0 = 0.0;
    std::vector<double> local(model.num_vars, 0.0);
    for (int i = 0; i < model.num_vars; ++i) local[i] = std::abs(model.linear[i]);
    for (const auto& [key, q] : model.quadratic) {
        local[key.first] += std::abs(q);
        local[key.second] += std::abs(q);
    }
    for (double v : local) t0 = std::max(t0, v);
    return t0 > 0.0 ? t0 : 1.0;
}

namespace {

struct ResolvedSchedule {
    long long sweeps;
    double t0, tf, gamma0, gammaf, beta;
    int slices;
};

ResolvedSchedule resolve(const QuadraticModel& model, const AnnealSchedule& s) {
    if (s.total_sweeps < 1) throw std::invalid_argument("schedule: total_sweeps must be >= 1");
    if (s.trotter_slices < 2) throw std::invalid_argument("schedule: trotter_slices must be >= 2");
    ResolvedSchedule r;
    r.sweeps = s.total_sweeps;
    r.t0 = s.t0 > 0.0 ? s.t0 : default_t0(model);
    r.tf = s.tf > 0.0 ? s.tf : 1e-3 * r.t0;
    if (r.tf > r.t0) throw std::invalid_argument("schedule: tf must not exceed t0");
    r.gamma0 = s.gamma0 > 0.0 ? s.gamma0 : 3.0 * r.t0;
    r.gammaf = s.gammaf > 0.0 ? s.gammaf : 1e-4 * r.t0;
    if (r.gammaf > r.gamma0) throw std::invalid_argument("schedule: gammaf must not exceed gamma0");
    r.beta = s.beta > 0.0 ? s.beta : 64.0 / r.t0;
    r.slices = s.trotter_slices;
    return r;
}

double geometric_temperature(const ResolvedSchedule& r, long long sweep) {
    if (r.sweeps == 1) return r.t0;
    const double frac = static_cast<double>(sweep) / static_cast<double>(r.sweeps - 1);
    return r.t0 * std::pow(r.tf / r.t0, frac);
}

} // namespace

SolveResult simulated_annealing(const QuadraticModel& model, const AnnealSchedule& schedule,
                                std::uint64_t seed, const SweepObserver& observer) {
    const ResolvedSchedule r = resolve(model, schedule);
    const int m = model.num_vars;
    const auto adj = model.adjacency();
    rng64 gen(seed);

    std::vector<std::uint8_t> config(m);
    for (int i = 0; i < m; ++i) config[i] = uniform_double(gen) < 0.5 ? 0 : 1;
    double energy = model.energy(config);

    SolveResult res;
    res.seed = seed;
    res.sweeps_used = r.sweeps;
    res.best_config = config;
    double best = energy;
    long long accepted = 0;

    for (long long sweep = 0; sweep < r.sweeps; ++sweep) {
        const double temp = geometric_temperature(r, sweep);
        const double inv_t = 1.0 / temp;
        for (int i = 0; i < m; ++i) {
            double delta = model.linear[i];
            for (const auto& [j, q] : adj[i])
                if (config[j]) delta += q;
            if (config[i]) delta = -delta;
            const double u = uniform_double(gen); // drawn unconditionally
            if (delta <= 0.0 || u < std::exp(-delta * inv_t)) {
                config[i] ^= 1;
                energy += delta;
                ++accepted;
                if (energy < best) {
                    best = energy;
                    res.best_config = config;
                }
            }
        }
        if ((sweep & 0xff) == 0xff) energy = model.energy(config); // drift resync
        if (schedule.record_trace) res.energy_trace.push_back(best);
        if (observer) observer(sweep, config);
    }
    res.best_energy = model.energy(res.best_config);
    res.acceptance_rate =
        static_cast<double>(accepted) / (static_cast<double>(r.sweeps) * std::max(m, 1));
    return res;
}

SolveResult simulated_quantum_annealing(const QuadraticModel& model,
                                        const AnnealSchedule& schedule, std::uint64_t seed) {
    const ResolvedSchedule r = resolve(model, schedule);
    const IsingModel ising = to_ising(model);
    const int m = ising.num_vars;
    const int P = r.slices;
    rng64 gen(seed);

    // neighbor lists from the Ising couplings
    std::vector<std::vector<std::pair<int, double>>> adj(m);
    for (const auto& [key, j] : ising.j) {
        adj[key.first].emplace_back(key.second, j);
        adj[key.second].emplace_back(key.first, j);
    }

    std::vector<std::int8_t> spins(static_cast<std::size_t>(P) * m);
    for (auto& s : spins) s = uniform_double(gen) < 0.5 ? -1 : 1;
    const auto at = [&](int p, int i) -> std::int8_t& {
        return spins[static_cast<std::size_t>(p) * m + i];
    };

    // per-slice Ising problem energies, maintained incrementally
    std::vector<double> slice_energy(P);
    const auto eval_slice = [&](int p) {
        std::vector<std::int8_t> s(spins.begin() + static_cast<std::size_t>(p) * m,
                                   spins.begin() + static_cast<std::size_t>(p + 1) * m);
        return ising.energy(s);
    };
    for (int p = 0; p < P; ++p) slice_energy[p] = eval_slice(p);

    SolveResult res;
    res.seed = seed;
    res.sweeps_used = r.sweeps;
    double best = slice_energy[0];
    int best_slice = 0;
    std::vector<std::int8_t> best_spins(spins.begin(), spins.begin() + m);
    for (int p = 1; p < P; ++p)
        if (slice_energy[p] < best) {
            best = slice_energy[p];
            best_slice = p;
            best_spins.assign(spins.begin() + static_cast<std::size_t>(p) * m,
                              spins.begin() + static_cast<std::size_t>(p + 1) * m);
        }
    (void)best_slice;
    long long accepted = 0;

    // One slice move costs ramp * dE_slice - J_perp * d(sigma sigma) and is
    // accepted at the effective inverse temperature beta/P, which together
    // with the J_perp above reproduces the Suzuki-Trotter action exactly.
    const double beta_eff = r.beta / P;
    const double gamma_floor = 1e-12 * r.gamma0;
    for (long long sweep = 0; sweep < r.sweeps; ++sweep) {
        const double s = (static_cast<double>(sweep) + 0.5) / static_cast<double>(r.sweeps);
        const double ramp = s; // problem couplings ramp linearly (B)
        double gamma = r.gamma0 + (r.gammaf - r.gamma0) * s;
        gamma = std::max(gamma, gamma_floor);
        const double j_perp =
            -(static_cast<double>(P) / (2.0 * r.beta)) * std::log(std::tanh(r.beta * gamma / P));

        for (int p = 0; p < P; ++p) {
            const int up = (p + 1) % P;
            const int dn = (p + P - 1) % P;
            for (int i = 0; i < m; ++i) {
                const double sig = at(p, i);
                double field = ising.h[i];
                for (const auto& [j, jij] : adj[i]) field += jij * at(p, j);
                const double d_problem = -2.0 * sig * field; // unscaled slice energy change
                const double d_interslice = 2.0 * j_perp * sig * (at(dn, i) + at(up, i));
                const double d_eff = ramp * d_problem + d_interslice;
                const double u = uniform_double(gen); // drawn unconditionally
                if (d_eff <= 0.0 || u < std::exp(-beta_eff * d_eff)) {
                    at(p, i) = static_cast<std::int8_t>(-sig);
                    slice_energy[p] += d_problem;
                    ++accepted;
                    if (slice_energy[p] < best) {
                        best = slice_energy[p];
                        best_spins.assign(spins.begin() + static_cast<std::size_t>(p) * m,
                                          spins.begin() + static_cast<std::size_t>(p + 1) * m);
                    }
                }
            }
        }
        if ((sweep & 0xff) == 0xff)
            for (int p = 0; p < P; ++p) slice_energy[p] = eval_slice(p);
    }

    res.best_config.assign(m, 0);
    for (int i = 0; i < m; ++i) res.best_config[i] = best_spins[i] < 0 ? 1 : 0; // a=(1-sigma)/2
    res.best_energy = model.energy(res.best_config);
    res.acceptance_rate = static_cast<double>(accepted) /
                          (static_cast<double>(r.sweeps) * std::max(m, 1) * P);
    double overlap = 0.0;
    for (int p = 0; p < P; ++p)
        for (int i = 0; i < m; ++i) overlap += at(p, i) * at((p + 1) % P, i);
    res.final_slice_overlap = overlap / (static_cast<double>(P) * std::max(m, 1));
    return res;
}

Tour two_opt_baseline(const TspInstance& inst, std::uint64_t seed, int restarts) {
    const int n = inst.n;
    if (n < 4) throw std::invalid_argument("two_opt_baseline: need n >= 4");
    if (restarts < 1) throw std::invalid_argument("two_opt_baseline: need restarts >= 1");
    rng64 gen(seed);

    std::vector<int> best_order;
    double best_len = std::numeric_limits<double>::infinity();

    for (int restart = 0; restart < restarts; ++restart) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        for (int i = n - 1; i >= 1; --i) {
            const int j = static_cast<int>(uniform_index(gen, i + 1));
            std::swap(order[i], order[j]);
        }

        double len = tour_length(order, inst);
        while (true) {
            // steepest descent: scan every reversal order[i+1..j]
            double best_delta = -1e-12;
            int best_i = -1, best_j = -1;
            for (int i = 0; i < n - 1; ++i) {
                const int a = order[i], b = order[i + 1];
                const double d_ab = inst.d(a, b);
                for (int j = i + 2; j < n; ++j) {
                    if (i == 0 && j == n - 1) continue; // same cycle
                    const int c = order[j], e = order[(j + 1) % n];
                    const double delta = inst.d(a, c) + inst.d(b, e) - d_ab - inst.d(c, e);
                    if (delta < best_delta) {
                        best_delta = delta;
                        best_i = i;
                        best_j = j;
                    }
                }
            }
            if (best_i < 0) break;
            std::reverse(order.begin() + best_i + 1, order.begin() + best_j + 1);
            len += best_delta;
        }

        len = tour_length(order, inst);
        if (len < best_len) {
            best_len = len;
            best_order = order;
        }
    }
    return make_tour(std::move(best_order), inst);
}

} // namespace qatsp
