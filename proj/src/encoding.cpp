#include "qatsp/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qatsp {

QuadraticModel encode_permutation(const TspInstance& inst, const PenaltyWeights& w,
                                  bool reduced) {
    const int n = inst.n;
    const double bound = inst.max_distance() / 2.0;
    if (w.eta < bound) {
        std::ostringstream msg;
        msg << "encode_permutation: eta=" << w.eta << " below the required bound max{d_ij}/2="
            << bound;
        throw std::invalid_argument(msg.str());
    }

    QuadraticModel m;
    m.varmap = VariableMap::permutation_map(n, reduced);
    m.num_vars = m.varmap.num_vars();
    m.linear.assign(m.num_vars, 0.0);

    const auto present = [&](int city, int time) {
        return !reduced || (city != 0 && time != 0);
    };

    // Tour length: d_ij a_{i,k} a_{j,k+1} over ordered pairs i != j, timestep
    // wrapping cyclically. In the reduced grid a_{0,0} = 1 is substituted, so
    // terms adjacent to timestep 0 become linear.
    for (int k = 0; k < n; ++k) {
        const int k1 = (k + 1) % n;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double dij = inst.d(i, j);
                const bool a_present = present(i, k);
                const bool b_present = present(j, k1);
                if (a_present && b_present) {
                    m.add_quadratic(m.varmap.grid_var(i, k), m.varmap.grid_var(j, k1), dij);
                } else if (!a_present && b_present) {
                    if (i == 0 && k == 0) m.add_linear(m.varmap.grid_var(j, k1), dij);
                    // other absent cells are fixed to 0: term vanishes
                } else if (a_present && !b_present) {
                    if (j == 0 && k1 == 0) m.add_linear(m.varmap.grid_var(i, k), dij);
                }
                // both absent: a_{0,0} a_{0,0} cannot occur for i != j
            }
        }
    }

    // Row constraints (each city appears once) and column constraints (each
    // timestep hosts one city): eta * (1 - sum)^2. Row 0 and column 0 vanish
    // identically in the reduced grid.
    std::vector<std::pair<int, double>> terms;
    const int lo = reduced ? 1 : 0;
    for (int i = lo; i < n; ++i) {
        terms.clear();
        for (int k = lo; k < n; ++k) terms.emplace_back(m.varmap.grid_var(i, k), 1.0);
        m.add_squared_penalty(w.eta, -1.0, terms);
    }
    for (int k = lo; k < n; ++k) {
        terms.clear();
        for (int i = lo; i < n; ++i) terms.emplace_back(m.varmap.grid_var(i, k), 1.0);
        m.add_squared_penalty(w.eta, -1.0, terms);
    }
    return m;
}

QuadraticModel encode_edge(const TspInstance& inst, const PenaltyWeights& w,
                           std::optional<int> L) {
    QuadraticModel m;
    m.varmap = VariableMap::edge_map(inst, L);
    m.num_vars = m.varmap.num_vars();
    m.linear.assign(m.num_vars, 0.0);

    for (std::size_t e = 0; e < m.varmap.edges.size(); ++e) {
        const auto [i, j] = m.varmap.edges[e];
        m.linear[e] += inst.d(i, j);
    }

    // Degree constraint per city: eta * (2 - sum of incident edges)^2.
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < inst.n; ++i) {
        terms.clear();
        for (int j = 0; j < inst.n; ++j) {
            if (j == i) continue;
            const int var = m.varmap.edge_var(i, j);
            if (var >= 0) terms.emplace_back(var, 1.0);
        }
        m.add_squared_penalty(w.eta, -2.0, terms);
    }
    return m;
}

namespace {

std::vector<int> cut_edge_vars(const QuadraticModel& model, const std::vector<int>& subset) {
    const int n = model.varmap.n;
    std::vector<char> in_subset(n, 0);
    for (int c : subset) {
        if (c < 0 || c >= n)
            throw std::invalid_argument("subtour penalty: city index out of range");
        in_subset[c] = 1;
    }
    const int size = static_cast<int>(std::count(in_subset.begin(), in_subset.end(), 1));
    if (size == 0 || size == n)
        throw std::invalid_argument("subtour penalty: subset must be proper and nonempty");
    std::vector<int> vars;
    for (std::size_t e = 0; e < model.varmap.edges.size(); ++e) {
        const auto [i, j] = model.varmap.edges[e];
        if (in_subset[i] != in_subset[j]) vars.push_back(static_cast<int>(e));
    }
    return vars;
}

std::string subset_label(const std::vector<int>& subset) {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (i) out << ',';
        out << subset[i];
    }
    out << '}';
    return out.str();
}

} // namespace

void add_subtour_penalty(QuadraticModel& model, const std::vector<int>& subset, int C,
                         double eta_prime) {
    if (model.varmap.kind != VarKind::permutation && model.varmap.kind != VarKind::edge)
        throw std::invalid_argument("add_subtour_penalty: unknown variable map");
    if (model.varmap.kind == VarKind::permutation)
        throw std::invalid_argument("add_subtour_penalty: unsupported for the permutation mapping");
    if (C != 2 && C != 3)
        throw std::invalid_argument("add_subtour_penalty: C must be 2 or 3, got " +
                                    std::to_string(C));
    const auto vars = cut_edge_vars(model, subset);
    if (vars.empty())
        model.warnings.push_back("subtour penalty for subset " + subset_label(subset) +
                                 " is vacuous: every cut edge was truncated away");
    std::vector<std::pair<int, double>> terms;
    terms.reserve(vars.size());
    for (int v : vars) terms.emplace_back(v, -1.0);
    model.add_squared_penalty(eta_prime, static_cast<double>(C), terms);
}

void add_slack_subtour_penalty(QuadraticModel& model, const std::vector<int>& subset,
                               double eta_prime, double eta_double_prime) {
    if (model.varmap.kind == VarKind::permutation)
        throw std::invalid_argument(
            "add_slack_subtour_penalty: unsupported for the permutation mapping");
    const auto vars = cut_edge_vars(model, subset);
    if (vars.empty())
        model.warnings.push_back("slack subtour penalty for subset " + subset_label(subset) +
                                 " is vacuous: every cut edge was truncated away");

    SlackGroup group;
    group.subset = subset;
    std::sort(group.subset.begin(), group.subset.end());
    group.first_var = model.num_vars;
    group.count = static_cast<int>(subset.size());
    model.varmap.slack_groups.push_back(group);
    model.num_vars += group.count;
    model.linear.resize(model.num_vars, 0.0);

    // eta' * (sum_cut a - sum_k 2k s_k)^2
    std::vector<std::pair<int, double>> terms;
    for (int v : vars) terms.emplace_back(v, 1.0);
    for (int k = 1; k <= group.count; ++k)
        terms.emplace_back(group.first_var + k - 1, -2.0 * k);
    model.add_squared_penalty(eta_prime, 0.0, terms);

    // eta'' * (sum_k s_k - 1)^2
    terms.clear();
    for (int k = 1; k <= group.count; ++k) terms.emplace_back(group.first_var + k - 1, 1.0);
    model.add_squared_penalty(eta_double_prime, -1.0, terms);
}

IsingModel to_ising(const QuadraticModel& model) {
    IsingModel ising;
    ising.num_vars = model.num_vars;
    ising.varmap = model.varmap;
    ising.h.assign(model.num_vars, 0.0);
    ising.offset = model.offset;
    for (int i = 0; i < model.num_vars; ++i) {
        ising.offset += model.linear[i] / 2.0;
        ising.h[i] -= model.linear[i] / 2.0;
    }
    for (const auto& [key, q] : model.quadratic) {
        ising.offset += q / 4.0;
        ising.h[key.first] -= q / 4.0;
        ising.h[key.second] -= q / 4.0;
        ising.j[key] += q / 4.0;
    }
    return ising;
}

std::string ViolationReport::to_string() const {
    std::ostringstream out;
    out << "violated constraints:";
    for (const auto& v : violations) {
        switch (v.kind) {
        case ConstraintViolation::Kind::row:
            out << " [city " << v.index << " visited " << v.value << "x]";
            break;
        case ConstraintViolation::Kind::column:
            out << " [timestep " << v.index << " hosts " << v.value << " cities]";
            break;
        case ConstraintViolation::Kind::degree:
            out << " [city " << v.index << " has degree " << v.value << "]";
            break;
        }
    }
    return out.str();
}

namespace {

DecodeResult decode_permutation(const std::vector<std::uint8_t>& config, const VariableMap& vm,
                                const TspInstance& inst) {
    const int n = vm.n;
    ViolationReport report;
    const int lo = vm.reduced ? 1 : 0;
    std::vector<int> city_at_time(n, -1);
    for (int i = lo; i < n; ++i) {
        int count = 0;
        for (int k = lo; k < n; ++k)
            if (config[vm.grid_var(i, k)]) ++count;
        if (count != 1)
            report.violations.push_back({ConstraintViolation::Kind::row, i, count});
    }
    for (int k = lo; k < n; ++k) {
        int count = 0;
        for (int i = lo; i < n; ++i)
            if (config[vm.grid_var(i, k)]) {
                ++count;
                city_at_time[k] = i;
            }
        if (count != 1)
            report.violations.push_back({ConstraintViolation::Kind::column, k, count});
    }
    if (vm.reduced) city_at_time[0] = 0;
    if (!report.violations.empty()) return report;
    return make_tour(std::move(city_at_time), inst);
}

DecodeResult decode_edge(const std::vector<std::uint8_t>& config, const VariableMap& vm,
                         const TspInstance& inst) {
    const int n = vm.n;
    std::vector<std::vector<int>> adjacent(n);
    for (std::size_t e = 0; e < vm.edges.size(); ++e) {
        if (!config[e]) continue;
        const auto [i, j] = vm.edges[e];
        adjacent[i].push_back(j);
        adjacent[j].push_back(i);
    }
    ViolationReport report;
    for (int i = 0; i < n; ++i)
        if (adjacent[i].size() != 2)
            report.violations.push_back({ConstraintViolation::Kind::degree, i,
                                         static_cast<int>(adjacent[i].size())});
    if (!report.violations.empty()) return report;

    std::vector<char> seen(n, 0);
    std::vector<std::vector<int>> cycles;
    for (int start = 0; start < n; ++start) {
        if (seen[start]) continue;
        std::vector<int> cyc;
        int prev = -1, at = start;
        do {
            cyc.push_back(at);
            seen[at] = 1;
            const int next = (adjacent[at][0] != prev) ? adjacent[at][0] : adjacent[at][1];
            prev = at;
            at = next;
        } while (at != start);
        cycles.push_back(std::move(cyc));
    }
    if (cycles.size() == 1) return make_tour(std::move(cycles.front()), inst);
    return CycleCover::from_cycles(std::move(cycles), inst);
}

} // namespace

DecodeResult decode(const std::vector<std::uint8_t>& config, const VariableMap& varmap,
                    const TspInstance& inst) {
    if (static_cast<int>(config.size()) < varmap.num_primary())
        throw std::invalid_argument("decode: configuration shorter than the variable map");
    if (varmap.kind == VarKind::permutation) return decode_permutation(config, varmap, inst);
    return decode_edge(config, varmap, inst);
}

ResourceCounts resource_counts(const QuadraticModel& model) {
    ResourceCounts rc;
    rc.qubits = model.num_vars;
    for (const auto& [key, q] : model.quadratic)
        if (q != 0.0) ++rc.couplers;
    return rc;
}

long long permutation_qubit_formula(int n, bool reduced) {
    const long long m = reduced ? n - 1 : n;
    return m * m;
}

long long permutation_coupler_formula(int n) {
    const long long N = n;
    return (N - 2) * (N - 1) * (N - 1) + N * N * (N - 1);
}

long long edge_qubit_formula(int n, std::optional<int> L) {
    const long long N = n;
    if (!L) return N * (N - 1) / 2;
    return N * static_cast<long long>(*L) / 2;
}

int flips_for_2opt_permutation(const Tour& tour, int first, int last) {
    const int n = static_cast<int>(tour.order.size());
    if (first < 0 || last >= n || first > last)
        throw std::invalid_argument("flips_for_2opt_permutation: bad segment bounds");
    std::vector<int> reversed = tour.order;
    std::reverse(reversed.begin() + first, reversed.begin() + last + 1);
    // Hamming distance between the two full permutation grids.
    int flips = 0;
    for (int k = 0; k < n; ++k)
        if (tour.order[k] != reversed[k]) flips += 2; // one bit off, one bit on
    return flips;
}

int flips_for_kopt_edge(int k) {
    if (k < 2) throw std::invalid_argument("flips_for_kopt_edge: k must be >= 2");
    return 2 * k;
}

int worst_case_crossing_flips(int n, int r) {
    if (n < 3 || r < 1) throw std::invalid_argument("worst_case_crossing_flips: need n >= 3, r >= 1");
    const int num = n - (r - 1);
    const int den = r + 1;
    const int ceil_term = (num + den - 1) / den;
    return 2 * (n - ceil_term);
}

} // namespace qatsp
