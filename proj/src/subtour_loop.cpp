#include "qatsp/subtour_loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "qatsp/rng.hpp"

namespace qatsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Smaller side of the cut, canonically the one not containing city 0.
std::vector<int> canonical_subset(const std::vector<int>& cities, int n) {
    std::vector<char> member(n, 0);
    for (int c : cities) member[c] = 1;
    std::vector<int> side;
    if (member[0]) {
        for (int c = 0; c < n; ++c)
            if (!member[c]) side.push_back(c);
    } else {
        side = cities;
        std::sort(side.begin(), side.end());
    }
    return side;
}

// penalty of one constraint as a function of the final cut count
double constraint_penalty(const CutConstraint& c, int cut) {
    if (!c.slack) {
        const double miss = static_cast<double>(c.C - cut);
        return c.eta_prime * miss * miss;
    }
    // optimal slack assignment: either no slack set, or exactly one s_k
    const int m = static_cast<int>(c.subset.size());
    double best = c.eta_double_prime + c.eta_prime * static_cast<double>(cut) * cut;
    for (int k = 1; k <= m; ++k) {
        const double miss = static_cast<double>(cut - 2 * k);
        best = std::min(best, c.eta_prime * miss * miss);
    }
    return best;
}

} // namespace

std::variant<CycleCover, ViolationReport> detect_subtours(const std::vector<std::uint8_t>& config,
                                                          const VariableMap& varmap,
                                                          const TspInstance& inst) {
    if (varmap.kind != VarKind::edge)
        throw std::invalid_argument("detect_subtours: edge-kind variable map required");
    DecodeResult res = decode(config, varmap, inst);
    if (auto* violation = std::get_if<ViolationReport>(&res)) return std::move(*violation);
    if (auto* cover = std::get_if<CycleCover>(&res)) return std::move(*cover);
    // single tour: report it as a one-cycle cover
    const Tour& tour = std::get<Tour>(res);
    return CycleCover::from_cycles({tour.order}, inst);
}

CycleCover constrained_min_cycle_cover(const TspInstance& inst,
                                       const std::vector<CutConstraint>& constraints,
                                       const VariableMap* edge_map) {
    const int n = inst.n;
    const int nc = static_cast<int>(constraints.size());

    // retained adjacency (all edges unless a truncated map is given)
    std::vector<std::vector<char>> retained(n, std::vector<char>(n, 1));
    if (edge_map) {
        for (auto& row : retained) std::fill(row.begin(), row.end(), 0);
        for (const auto& [i, j] : edge_map->edges) retained[i][j] = retained[j][i] = 1;
    }
    for (int i = 0; i < n; ++i) retained[i][i] = 0;

    // membership masks and monotone penalty lower bounds per constraint:
    // cut counts only grow as edges are added, so min over x >= current is
    // an admissible bound.
    std::vector<std::vector<char>> member(nc, std::vector<char>(n, 0));
    std::vector<std::vector<double>> pen_from(nc);
    for (int t = 0; t < nc; ++t) {
        for (int c : constraints[t].subset) member[t][c] = 1;
        int cap = 0; // retained cut edges
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (retained[i][j] && member[t][i] != member[t][j]) ++cap;
        pen_from[t].assign(cap + 2, 0.0);
        for (int x0 = cap + 1; x0 >= 0; --x0) {
            double v = constraint_penalty(constraints[t], std::min(x0, cap));
            if (x0 + 1 <= cap + 1) v = std::min(v, pen_from[t][x0 + 1]);
            pen_from[t][x0] = v;
        }
    }

    // static two-cheapest retained distances per city, for the weight bound
    std::vector<double> che1(n, kInf), che2(n, kInf);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i || !retained[i][j]) continue;
            const double d = inst.d(i, j);
            if (d < che1[i]) {
                che2[i] = che1[i];
                che1[i] = d;
            } else if (d < che2[i]) {
                che2[i] = d;
            }
        }
        if (che1[i] == kInf)
            throw std::invalid_argument("constrained_min_cycle_cover: isolated city " +
                                        std::to_string(i) + " in retained edge set");
        if (che2[i] == kInf) che2[i] = che1[i];
    }

    struct Search {
        const TspInstance& inst;
        const std::vector<CutConstraint>& constraints;
        const std::vector<std::vector<char>>& retained;
        const std::vector<std::vector<char>>& member;
        const std::vector<std::vector<double>>& pen_from;
        const std::vector<double>& che1;
        const std::vector<double>& che2;
        int n, nc;

        std::vector<char> assigned;
        std::vector<int> path;
        std::vector<int> cut; // per-constraint count over placed edges
        std::vector<std::vector<int>> done;
        double weight = 0.0;
        double unassigned_half_bound = 0.0; // sum over unassigned of (che1+che2)/2

        double best = kInf;
        std::vector<std::vector<int>> best_cycles;

        double penalty_bound() const {
            double lb = 0.0;
            for (int t = 0; t < nc; ++t) {
                const auto& pf = pen_from[t];
                lb += pf[std::min<std::size_t>(cut[t], pf.size() - 1)];
            }
            return lb;
        }

        void add_edge_cuts(int a, int b, int dir) {
            for (int t = 0; t < nc; ++t)
                if (member[t][a] != member[t][b]) cut[t] += dir;
        }

        void complete() {
            double obj = weight;
            for (int t = 0; t < nc; ++t) obj += constraint_penalty(constraints[t], cut[t]);
            if (obj < best) {
                best = obj;
                best_cycles = done;
            }
        }

        void recurse() {
            if (path.empty()) {
                int anchor = -1;
                for (int i = 0; i < n; ++i)
                    if (!assigned[i]) {
                        anchor = i;
                        break;
                    }
                if (anchor < 0) {
                    complete();
                    return;
                }
                assigned[anchor] = 1;
                unassigned_half_bound -= (che1[anchor] + che2[anchor]) / 2.0;
                path.push_back(anchor);
                recurse();
                path.pop_back();
                unassigned_half_bound += (che1[anchor] + che2[anchor]) / 2.0;
                assigned[anchor] = 0;
                return;
            }

            const int anchor = path.front();
            const int last = path.back();
            // bound: placed weight + half-degree bound on future edges + penalty
            const double open_half = (che1[last] + che1[anchor]) / 2.0;
            if (weight + unassigned_half_bound + open_half + penalty_bound() >= best + 1e-9)
                return;

            // close the cycle (canonical direction: second city < last city)
            if (path.size() >= 3 && retained[last][anchor] && path[1] < last) {
                add_edge_cuts(last, anchor, +1);
                weight += inst.d(last, anchor);
                done.push_back(path);
                recurse();
                done.pop_back();
                weight -= inst.d(last, anchor);
                add_edge_cuts(last, anchor, -1);
            }

            // extend the path
            for (int w = 0; w < n; ++w) {
                if (assigned[w] || !retained[last][w]) continue;
                assigned[w] = 1;
                unassigned_half_bound -= (che1[w] + che2[w]) / 2.0;
                add_edge_cuts(last, w, +1);
                weight += inst.d(last, w);
                path.push_back(w);
                recurse();
                path.pop_back();
                weight -= inst.d(last, w);
                add_edge_cuts(last, w, -1);
                unassigned_half_bound += (che1[w] + che2[w]) / 2.0;
                assigned[w] = 0;
            }
        }
    };

    Search search{inst, constraints, retained, member, pen_from, che1, che2, n, nc};
    search.assigned.assign(n, 0);
    search.cut.assign(std::max(nc, 1), 0);
    for (int i = 0; i < n; ++i) search.unassigned_half_bound += (che1[i] + che2[i]) / 2.0;

    // warm start: the unconstrained oracle cover and the optimal tour, when
    // their edges are all retained
    const auto try_seed_cover = [&](const std::vector<std::vector<int>>& cycles) {
        double w = 0.0;
        std::vector<int> cuts(std::max(nc, 1), 0);
        for (const auto& cyc : cycles) {
            for (std::size_t k = 0; k < cyc.size(); ++k) {
                const int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
                if (!retained[a][b]) return;
                w += inst.d(a, b);
                for (int t = 0; t < nc; ++t)
                    if (member[t][a] != member[t][b]) ++cuts[t];
            }
        }
        double obj = w;
        for (int t = 0; t < nc; ++t) obj += constraint_penalty(constraints[t], cuts[t]);
        if (obj < search.best) {
            search.best = obj;
            search.best_cycles = cycles;
        }
    };
    if (n <= 14) try_seed_cover(min_cycle_cover(inst).cycles);
    if (n <= 20) try_seed_cover({optimal_tour(inst).order});
    // the warm start only seeds the bound; the search still proves optimality
    search.best += 1e-9;
    search.recurse();
    if (search.best_cycles.empty())
        throw std::invalid_argument("constrained_min_cycle_cover: no cycle cover exists");
    return CycleCover::from_cycles(std::move(search.best_cycles), inst);
}

namespace {

// slack assignment matching constraint_penalty's optimum, for building the
// full configuration behind an exact-solver cover
void assign_slacks(std::vector<std::uint8_t>& config, const VariableMap& vm,
                   const std::vector<CutConstraint>& constraints,
                   const std::vector<int>& cut_counts) {
    for (std::size_t g = 0; g < vm.slack_groups.size(); ++g) {
        const auto& group = vm.slack_groups[g];
        const auto& c = constraints[g];
        const int x = cut_counts[g];
        double none = c.eta_double_prime + c.eta_prime * static_cast<double>(x) * x;
        int best_k = 0;
        double best = none;
        for (int k = 1; k <= group.count; ++k) {
            const double miss = static_cast<double>(x - 2 * k);
            const double v = c.eta_prime * miss * miss;
            if (v < best) {
                best = v;
                best_k = k;
            }
        }
        if (best_k > 0) config[group.first_var + best_k - 1] = 1;
    }
}

} // namespace

LoopResult iterate_solve(const TspInstance& inst, const LoopPolicy& policy, std::uint64_t seed) {
    if (policy.max_iterations < 1)
        throw std::invalid_argument("iterate_solve: max_iterations must be >= 1");
    if (policy.escalation_factor < 1.0)
        throw std::invalid_argument("iterate_solve: escalation factor must be >= 1");
    if (policy.C != 2 && policy.C != 3)
        throw std::invalid_argument("iterate_solve: C must be 2 or 3");

    const PenaltyWeights base = policy.weights ? *policy.weights
                                               : PenaltyWeights::defaults_for(inst);
    LoopResult result;
    std::vector<CutConstraint> constraints;
    std::set<std::vector<int>> seen;
    const auto t_start = std::chrono::steady_clock::now();
    const auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    };

    for (int iter = 1; iter <= policy.max_iterations; ++iter) {
        // with C=3 the eta/eta' ratio must grow each round; eta is scaled up
        PenaltyWeights w = base;
        w.eta *= std::pow(policy.escalation_factor, iter - 1);

        const auto build_model = [&](double eta_scale) {
            PenaltyWeights wi = w;
            wi.eta *= eta_scale;
            QuadraticModel model = encode_edge(inst, wi, policy.truncation);
            for (const auto& c : constraints) {
                if (c.slack)
                    add_slack_subtour_penalty(model, c.subset, c.eta_prime, c.eta_double_prime);
                else
                    add_subtour_penalty(model, c.subset, c.C, c.eta_prime);
            }
            return model;
        };

        IterationLog log;
        log.iteration = iter;
        log.C_used = policy.C;
        log.eta_prime_used = base.eta_prime;

        QuadraticModel model = build_model(1.0);

        if (policy.solver == InnerSolver::exact) {
            const CycleCover cover = constrained_min_cycle_cover(inst, constraints, &model.varmap);
            std::vector<std::uint8_t> config(model.num_vars, 0);
            std::vector<int> cut_counts(constraints.size(), 0);
            for (const auto& cyc : cover.cycles) {
                for (std::size_t k = 0; k < cyc.size(); ++k) {
                    const int a = cyc[k], b = cyc[(k + 1) % cyc.size()];
                    config[model.varmap.edge_var(a, b)] = 1;
                    for (std::size_t t = 0; t < constraints.size(); ++t) {
                        const auto& sub = constraints[t].subset;
                        const bool ina = std::binary_search(sub.begin(), sub.end(), a);
                        const bool inb = std::binary_search(sub.begin(), sub.end(), b);
                        if (ina != inb) ++cut_counts[t];
                    }
                }
            }
            assign_slacks(config, model.varmap, constraints, cut_counts);
            log.config = config;
            log.best_energy = model.energy(config);
            log.decoded = decode(config, model.varmap, inst);
        } else {
            // heuristic inner solver with re-anneal retries on degree violations
            for (int attempt = 0;; ++attempt) {
                const std::uint64_t run_seed =
                    derive_seed(seed, static_cast<std::uint64_t>(iter) * 16 + attempt);
                const QuadraticModel attempt_model =
                    attempt == 0 ? model : build_model(std::pow(2.0, attempt));
                const SolveResult res =
                    policy.solver == InnerSolver::sa
                        ? simulated_annealing(attempt_model, policy.schedule, run_seed)
                        : simulated_quantum_annealing(attempt_model, policy.schedule, run_seed);
                log.config = res.best_config;
                log.best_energy = model.energy(res.best_config);
                log.decoded = decode(res.best_config, model.varmap, inst);
                if (!std::holds_alternative<ViolationReport>(log.decoded) || attempt >= 3) break;
            }
        }

        if (std::holds_alternative<Tour>(log.decoded)) {
            result.tour = std::get<Tour>(log.decoded);
            result.success = true;
            log.cumulative_seconds = elapsed();
            result.logs.push_back(std::move(log));
            return result;
        }
        if (std::holds_alternative<ViolationReport>(log.decoded)) {
            log.cumulative_seconds = elapsed();
            result.logs.push_back(std::move(log));
            result.failure_reason = "degree violations persisted after re-anneal retries";
            return result;
        }

        const CycleCover& cover = std::get<CycleCover>(log.decoded);
        std::vector<std::vector<int>> fresh;
        for (const auto& cyc : cover.cycles) {
            auto canon = canonical_subset(cyc, inst.n);
            if (seen.insert(canon).second) {
                fresh.push_back(std::move(canon));
                if (!policy.constraints_per_round_all) break;
            }
        }
        for (const auto& sub : fresh) {
            CutConstraint c;
            c.subset = sub;
            c.C = policy.C;
            c.eta_prime = base.eta_prime;
            c.slack = policy.use_slack;
            c.eta_double_prime = base.eta_double_prime;
            constraints.push_back(std::move(c));
        }
        log.constraints_added = fresh;
        log.cumulative_seconds = elapsed();
        result.logs.push_back(std::move(log));

        if (fresh.empty() && policy.escalation_factor == 1.0) {
            result.failure_reason = "stalled: breakup repeats already-constrained subtours";
            return result;
        }
    }
    result.failure_reason = "max iterations exhausted without a single tour";
    return result;
}

std::map<int, long long> required_connections_histogram(
    const std::vector<std::pair<const TspInstance*, const LoopResult*>>& ensemble,
    int iteration) {
    std::map<int, long long> hist;
    for (const auto& [inst, loop] : ensemble) {
        for (const auto& log : loop->logs) {
            if (log.iteration != iteration) continue;
            const auto* cover = std::get_if<CycleCover>(&log.decoded);
            if (!cover || cover->cycles.size() < 2) continue;
            for (const auto& stat : connection_stats(*inst, *cover))
                ++hist[stat.required_connections];
        }
    }
    return hist;
}

} // namespace qatsp
