#include "qatsp/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qatsp/errors.hpp"

namespace qatsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

Tour optimal_tour(const TspInstance& inst) {
    const int n = inst.n;
    if (n > 20)
        throw capacity_error("optimal_tour: Held-Karp oracle capped at n=20, got n=" +
                             std::to_string(n));

    // r[S][j] = minimal length of a path that starts at city j, visits every
    // city NOT in S, and returns to city 0. S indexes subsets of {1..n-1}
    // (city 0 is implicit), j must be in S or j == 0 with S empty of j.
    // Completion costs enable a greedy front-to-back reconstruction that
    // yields the lexicographically smallest optimal order.
    const int m = n - 1;
    const std::size_t nmask = std::size_t{1} << m;
    std::vector<double> r(nmask * static_cast<std::size_t>(n), kInf);
    const auto idx = [n](std::size_t mask, int j) { return mask * n + j; };

    const std::size_t full = nmask - 1;
    for (int j = 1; j < n; ++j) r[idx(full, j)] = inst.d(j, 0);

    for (std::size_t mask = full; mask-- > 0;) {
        // j = 0 is only meaningful for the initial state handled below.
        for (int j = 1; j < n; ++j) {
            if (!(mask >> (j - 1) & 1)) continue;
            double best = kInf;
            for (int k = 1; k < n; ++k) {
                if (mask >> (k - 1) & 1) continue;
                const double cand = inst.d(j, k) + r[idx(mask | (std::size_t{1} << (k - 1)), k)];
                if (cand < best) best = cand;
            }
            r[idx(mask, j)] = best;
        }
    }
    double opt = kInf;
    for (int k = 1; k < n; ++k) {
        const double cand = inst.d(0, k) + r[idx(std::size_t{1} << (k - 1), k)];
        if (cand < opt) opt = cand;
    }

    // Greedy reconstruction: at each step pick the smallest next city whose
    // completion cost matches exactly (the DP minimum is one of these sums,
    // so at least one candidate compares equal).
    std::vector<int> order;
    order.reserve(n);
    order.push_back(0);
    std::size_t mask = 0;
    int at = 0;
    double need = opt;
    for (int step = 1; step < n; ++step) {
        for (int k = 1; k < n; ++k) {
            if (mask >> (k - 1) & 1) continue;
            const std::size_t nmask2 = mask | (std::size_t{1} << (k - 1));
            if (inst.d(at, k) + r[idx(nmask2, k)] == need) {
                order.push_back(k);
                need = r[idx(nmask2, k)];
                mask = nmask2;
                at = k;
                break;
            }
        }
    }
    if (static_cast<int>(order.size()) != n)
        throw std::logic_error("optimal_tour: reconstruction failed");
    return make_tour(std::move(order), inst);
}

CycleCover CycleCover::from_cycles(std::vector<std::vector<int>> cycles, const TspInstance& inst) {
    CycleCover cover;
    double w = 0.0;
    for (auto& cyc : cycles) {
        if (cyc.size() < 3) throw std::invalid_argument("cycle cover: cycle shorter than 3");
        for (std::size_t k = 0; k < cyc.size(); ++k)
            w += inst.d(cyc[k], cyc[(k + 1) % cyc.size()]);
        cyc = canonical_cycle(std::move(cyc));
    }
    std::sort(cycles.begin(), cycles.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    cover.cycles = std::move(cycles);
    cover.total_weight = w;
    return cover;
}

CycleCover min_cycle_cover(const TspInstance& inst) {
    const int n = inst.n;
    if (n > 14)
        throw capacity_error("min_cycle_cover: subset-DP oracle capped at n=14, got n=" +
                             std::to_string(n));

    const std::size_t nmask = std::size_t{1} << n;

    // path[mask][j]: minimal path anchored at min(mask), visiting exactly
    // mask, ending at j. Valid for j != min(mask) (or the singleton start).
    std::vector<double> path(nmask * static_cast<std::size_t>(n), kInf);
    const auto pidx = [n](std::size_t mask, int j) { return mask * n + j; };
    for (int a = 0; a < n; ++a) path[pidx(std::size_t{1} << a, a)] = 0.0;
    for (std::size_t mask = 1; mask < nmask; ++mask) {
        const int anchor = std::countr_zero(mask);
        for (int j = 0; j < n; ++j) {
            if (!(mask >> j & 1)) continue;
            const double pj = path[pidx(mask, j)];
            if (pj == kInf) continue;
            for (int k = anchor + 1; k < n; ++k) {
                if (mask >> k & 1 || k == j) continue;
                const std::size_t next = mask | (std::size_t{1} << k);
                const double cand = pj + inst.d(j, k);
                if (cand < path[pidx(next, k)]) path[pidx(next, k)] = cand;
            }
        }
    }

    // cycle[mask]: minimal Hamiltonian cycle on mask (|mask| >= 3).
    std::vector<double> cycle(nmask, kInf);
    for (std::size_t mask = 1; mask < nmask; ++mask) {
        if (std::popcount(mask) < 3) continue;
        const int anchor = std::countr_zero(mask);
        double best = kInf;
        for (int j = anchor + 1; j < n; ++j) {
            if (!(mask >> j & 1)) continue;
            const double cand = path[pidx(mask, j)] + inst.d(j, anchor);
            if (cand < best) best = cand;
        }
        cycle[mask] = best;
    }

    // cover[mask]: minimal cycle cover of mask; split off the cycle through
    // min(mask) and recurse. choice[mask] records that cycle's submask.
    std::vector<double> cover(nmask, kInf);
    std::vector<std::size_t> choice(nmask, 0);
    cover[0] = 0.0;
    for (std::size_t mask = 1; mask < nmask; ++mask) {
        if (std::popcount(mask) < 3) continue;
        const std::size_t low = mask & (~mask + 1);
        double best = kInf;
        std::size_t best_sub = 0;
        // enumerate submasks of mask containing the lowest set bit
        for (std::size_t sub = mask;; sub = (sub - 1) & mask) {
            if ((sub & low) && cycle[sub] != kInf) {
                const std::size_t rest = mask ^ sub;
                if (cover[rest] != kInf) {
                    const double cand = cycle[sub] + cover[rest];
                    if (cand < best || (cand == best && sub < best_sub)) {
                        best = cand;
                        best_sub = sub;
                    }
                }
            }
            if (sub == 0) break;
        }
        cover[mask] = best;
        choice[mask] = best_sub;
    }

    const std::size_t all = nmask - 1;
    if (cover[all] == kInf) throw std::logic_error("min_cycle_cover: no cover found");

    // reconstruct cycles, then each cycle's vertex order from the path DP
    std::vector<std::vector<int>> cycles;
    for (std::size_t rest = all; rest != 0;) {
        const std::size_t cyc_mask = choice[rest];
        const int anchor = std::countr_zero(cyc_mask);
        // find the endpoint that closed the optimal cycle (smallest on ties)
        int end = -1;
        for (int j = anchor + 1; j < n; ++j) {
            if (!(cyc_mask >> j & 1)) continue;
            if (path[pidx(cyc_mask, j)] + inst.d(j, anchor) == cycle[cyc_mask]) {
                end = j;
                break;
            }
        }
        if (end < 0) throw std::logic_error("min_cycle_cover: cycle reconstruction failed");
        std::vector<int> cyc;
        std::size_t mask = cyc_mask;
        int at = end;
        while (true) {
            cyc.push_back(at);
            if (at == anchor) break;
            const std::size_t prev_mask = mask ^ (std::size_t{1} << at);
            int prev = -1;
            for (int k = 0; k < n; ++k) {
                if (!(prev_mask >> k & 1)) continue;
                if (path[pidx(prev_mask, k)] + inst.d(k, at) == path[pidx(mask, at)]) {
                    prev = k;
                    break;
                }
            }
            if (prev < 0) throw std::logic_error("min_cycle_cover: path reconstruction failed");
            mask = prev_mask;
            at = prev;
        }
        std::reverse(cyc.begin(), cyc.end());
        cycles.push_back(std::move(cyc));
        rest ^= cyc_mask;
    }
    return CycleCover::from_cycles(std::move(cycles), inst);
}

int cut_crossings(const std::vector<int>& order, const std::vector<int>& subset, int n) {
    std::vector<char> in_subset(n, 0);
    for (int c : subset) in_subset[c] = 1;
    int crossings = 0;
    const int len = static_cast<int>(order.size());
    for (int k = 0; k < len; ++k)
        if (in_subset[order[k]] != in_subset[order[(k + 1) % len]]) ++crossings;
    return crossings;
}

std::vector<ConnectionStat> connection_stats(const TspInstance& inst, const CycleCover& cover) {
    std::vector<ConnectionStat> stats;
    if (cover.cycles.size() < 2) return stats;
    const Tour opt = optimal_tour(inst);
    for (const auto& cyc : cover.cycles) {
        ConnectionStat s;
        s.subset = cyc;
        std::sort(s.subset.begin(), s.subset.end());
        s.required_connections = cut_crossings(opt.order, s.subset, inst.n);
        stats.push_back(std::move(s));
    }
    return stats;
}

std::pair<std::vector<std::uint8_t>, double>
exhaustive_ground_state(const QuadraticModel& model) {
    const int m = model.num_vars;
    if (m > 26)
        throw capacity_error("exhaustive_ground_state: capped at 26 variables, got " +
                             std::to_string(m));
    if (m == 0) return {{}, model.offset};

    const auto adj = model.adjacency();
    std::vector<std::uint8_t> config(m, 0);
    double energy = model.offset;

    std::vector<std::uint8_t> best_config = config;
    double best_energy = energy;
    // Margin for recognizing candidate minima despite incremental drift; the
    // running energy is resynced to an exact evaluation every 4096 steps to
    // keep the drift well below it.
    double scale = std::abs(model.offset);
    for (double v : model.linear) scale += std::abs(v);
    for (const auto& [k, v] : model.quadratic) scale += std::abs(v);
    const double tie_eps = scale * 1e-10;

    const auto lex_less = [m](const std::vector<std::uint8_t>& a,
                              const std::vector<std::uint8_t>& b) {
        for (int i = 0; i < m; ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    };

    // Gray-code walk: step k flips bit ctz(k); energy updated incrementally.
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t step = 1; step < total; ++step) {
        const int i = std::countr_zero(step);
        double delta = model.linear[i];
        for (const auto& [j, q] : adj[i])
            if (config[j]) delta += q;
        if (config[i]) delta = -delta;
        config[i] ^= 1;
        energy += delta;
        if ((step & 0xfff) == 0) energy = model.energy(config);

        if (energy < best_energy + tie_eps) {
            const double exact = model.energy(config);
            if (exact < best_energy ||
                (exact == best_energy && lex_less(config, best_config))) {
                best_energy = exact;
                best_config = config;
            }
        }
    }
    return {best_config, best_energy};
}

} // namespace qatsp
