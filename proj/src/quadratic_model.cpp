#include "qatsp/quadratic_model.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qatsp/errors.hpp"
#include "qatsp/instance.hpp"

namespace qatsp {

int VariableMap::num_primary() const {
    if (kind == VarKind::permutation) {
        const int m = reduced ? n - 1 : n;
        return m * m;
    }
    return static_cast<int>(edges.size());
}

int VariableMap::num_vars() const {
    int extra = 0;
    for (const auto& g : slack_groups) extra += g.count;
    return num_primary() + extra;
}

int VariableMap::grid_var(int city, int time) const {
    if (reduced) return (city - 1) * (n - 1) + (time - 1);
    return city * n + time;
}

std::pair<int, int> VariableMap::grid_cell(int var) const {
    if (reduced) return {var / (n - 1) + 1, var % (n - 1) + 1};
    return {var / n, var % n};
}

int VariableMap::edge_var(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(i, j));
    if (it == edges.end() || *it != std::make_pair(i, j)) return -1;
    return static_cast<int>(it - edges.begin());
}

VariableMap VariableMap::permutation_map(int n, bool reduced) {
    VariableMap vm;
    vm.kind = VarKind::permutation;
    vm.n = n;
    vm.reduced = reduced;
    return vm;
}

VariableMap VariableMap::edge_map(const TspInstance& inst, std::optional<int> truncation) {
    VariableMap vm;
    vm.kind = VarKind::edge;
    vm.n = inst.n;
    vm.truncation = truncation;
    if (!truncation) {
        for (int i = 0; i < inst.n; ++i)
            for (int j = i + 1; j < inst.n; ++j) vm.edges.emplace_back(i, j);
        return vm;
    }
    const int L = *truncation;
    if (L < 2 || L > inst.n - 1)
        throw std::invalid_argument("edge truncation L must be in [2, n-1], got " +
                                    std::to_string(L));
    // Union over cities of their L nearest neighbors; some cities may end up
    // with more than L incident edges.
    std::vector<std::pair<int, int>> retained;
    for (int i = 0; i < inst.n; ++i) {
        const auto ranks = neighbor_ranks(inst, i);
        for (int r = 0; r < L; ++r) {
            const int j = ranks[r];
            retained.emplace_back(std::min(i, j), std::max(i, j));
        }
    }
    std::sort(retained.begin(), retained.end());
    retained.erase(std::unique(retained.begin(), retained.end()), retained.end());
    vm.edges = std::move(retained);
    return vm;
}

double QuadraticModel::energy(const std::vector<std::uint8_t>& config) const {
    double e = offset;
    for (int i = 0; i < num_vars; ++i)
        if (config[i]) e += linear[i];
    for (const auto& [key, q] : quadratic)
        if (config[key.first] && config[key.second]) e += q;
    return e;
}

void QuadraticModel::add_linear(int i, double c) { linear[i] += c; }

void QuadraticModel::add_quadratic(int i, int j, double c) {
    if (i == j) throw std::invalid_argument("self-coupling is not representable");
    if (i > j) std::swap(i, j);
    quadratic[{i, j}] += c;
}

void QuadraticModel::add_squared_penalty(double weight, double constant,
                                         const std::vector<std::pair<int, double>>& terms) {
    offset += weight * constant * constant;
    for (std::size_t a = 0; a < terms.size(); ++a) {
        const auto& [va, ca] = terms[a];
        // cross term with the constant plus the folded square (a^2 = a)
        add_linear(va, weight * (2.0 * constant * ca + ca * ca));
        for (std::size_t b = a + 1; b < terms.size(); ++b) {
            const auto& [vb, cb] = terms[b];
            add_quadratic(va, vb, weight * 2.0 * ca * cb);
        }
    }
}

std::vector<std::vector<std::pair<int, double>>> QuadraticModel::adjacency() const {
    std::vector<std::vector<std::pair<int, double>>> adj(num_vars);
    for (const auto& [key, q] : quadratic) {
        adj[key.first].emplace_back(key.second, q);
        adj[key.second].emplace_back(key.first, q);
    }
    return adj;
}

double IsingModel::energy(const std::vector<std::int8_t>& spins) const {
    double e = offset;
    for (int i = 0; i < num_vars; ++i) e += h[i] * spins[i];
    for (const auto& [key, jij] : j) e += jij * spins[key.first] * spins[key.second];
    return e;
}

PenaltyWeights PenaltyWeights::defaults_for(const TspInstance& inst) {
    PenaltyWeights w;
    w.eta = 2.0 * inst.max_distance();
    w.eta_prime = w.eta;
    w.eta_double_prime = 4.0 * w.eta_prime;
    return w;
}

namespace {

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename Linear, typename Quad>
void write_model_impl(int num_vars, double offset, const char* form, const Linear& linear,
                      const Quad& quad, std::ostream& out) {
    out << "vars " << num_vars << " offset " << fmt_full(offset) << '\n';
    out << "form " << form << '\n';
    for (int i = 0; i < num_vars; ++i)
        if (linear[i] != 0.0) out << i << ' ' << i << ' ' << fmt_full(linear[i]) << '\n';
    for (const auto& [key, v] : quad)
        if (v != 0.0) out << key.first << ' ' << key.second << ' ' << fmt_full(v) << '\n';
}

} // namespace

void write_model(const QuadraticModel& m, std::ostream& out) {
    write_model_impl(m.num_vars, m.offset, "qubo", m.linear, m.quadratic, out);
}

void write_model(const IsingModel& m, std::ostream& out) {
    write_model_impl(m.num_vars, m.offset, "ising", m.h, m.j, out);
}

QuadraticModel read_model(std::istream& in, std::string& form) {
    QuadraticModel m;
    std::string line, tag;
    if (!std::getline(in, line)) throw parse_error("model file: empty input");
    {
        std::istringstream hs(line);
        std::string offset_tag;
        if (!(hs >> tag >> m.num_vars >> offset_tag >> m.offset) || tag != "vars" ||
            offset_tag != "offset" || m.num_vars < 0)
            throw parse_error("model file: bad header line, expected \"vars <num> offset <value>\"");
    }
    if (!std::getline(in, line)) throw parse_error("model file: missing \"form qubo|ising\" line");
    {
        std::istringstream fs(line);
        if (!(fs >> tag >> form) || tag != "form" || (form != "qubo" && form != "ising"))
            throw parse_error("model file: second line must be \"form qubo|ising\"");
    }
    m.linear.assign(m.num_vars, 0.0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ts(line);
        int i, j;
        double v;
        if (!(ts >> i >> j >> v)) throw parse_error("model file: malformed term line: " + line);
        if (i < 0 || j < 0 || i >= m.num_vars || j >= m.num_vars)
            throw parse_error("model file: variable index out of range in line: " + line);
        if (i == j)
            m.linear[i] += v;
        else
            m.add_quadratic(i, j, v);
    }
    return m;
}

} // namespace qatsp
