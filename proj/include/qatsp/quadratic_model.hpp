#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qatsp {

struct TspInstance;

enum class VarKind { permutation, edge };

// Slack variables appended by the slack subtour penalty: variables
// first_var .. first_var+count-1 are s_1 .. s_count for `subset`.
struct SlackGroup {
    std::vector<int> subset;
    int first_var = 0;
    int count = 0;
};

// Ties model variable indices to their semantic meaning: grid cells a_ik for
// the permutation mapping, undirected edges a_ij for the edge mapping.
struct VariableMap {
    VarKind kind = VarKind::edge;
    int n = 0; // city count

    // permutation mapping: full n*n grid, or (n-1)^2 grid with city 0 pinned
    // to timestep 0.
    bool reduced = false;

    // edge mapping: retained unordered pairs (i<j), sorted lexicographically.
    std::vector<std::pair<int, int>> edges;
    std::optional<int> truncation; // L, if the edge set was truncated

    std::vector<SlackGroup> slack_groups;

    int num_primary() const;
    int num_vars() const;

    // permutation accessors (city/time in the retained grid)
    int grid_var(int city, int time) const;
    std::pair<int, int> grid_cell(int var) const;

    // edge accessors; edge_var returns -1 for non-retained pairs
    int edge_var(int i, int j) const;

    static VariableMap permutation_map(int n, bool reduced);
    static VariableMap edge_map(const TspInstance& inst, std::optional<int> truncation);
};

// Binary quadratic model over a in {0,1}:
//   E(a) = offset + sum_i linear[i] a_i + sum_{i<j} quadratic[{i,j}] a_i a_j
struct QuadraticModel {
    int num_vars = 0;
    std::vector<double> linear;
    std::map<std::pair<int, int>, double> quadratic; // keys i<j
    double offset = 0.0;
    VariableMap varmap;
    std::vector<std::string> warnings;

    double energy(const std::vector<std::uint8_t>& config) const;

    void add_linear(int i, double c);
    void add_quadratic(int i, int j, double c); // i != j, any order
    // Adds weight * (constant + sum_k coeff_k a_{var_k})^2, expanded to
    // canonical QUBO form with a^2 = a folded into the linear part.
    void add_squared_penalty(double weight, double constant,
                             const std::vector<std::pair<int, double>>& terms);

    // Per-variable neighbor lists (j, coupling); used by solvers and the
    // exhaustive oracle for incremental energy updates.
    std::vector<std::vector<std::pair<int, double>>> adjacency() const;
};

// Spin form over sigma in {-1,+1}:
//   E(sigma) = offset + sum_i h[i] sigma_i + sum_{i<j} j[{i,j}] sigma_i sigma_j
struct IsingModel {
    int num_vars = 0;
    std::vector<double> h;
    std::map<std::pair<int, int>, double> j;
    double offset = 0.0;
    VariableMap varmap;

    double energy(const std::vector<std::int8_t>& spins) const;
};

// Penalty weights: eta multiplies the hard structural constraints (rows and
// columns of the permutation grid, vertex degrees of the edge mapping),
// eta_prime the per-subset subtour penalties, eta_double_prime the slack
// normalization term. Defaults: eta = 2 * max d_ij, eta_prime = eta,
// eta_double_prime = 4 * eta_prime.
struct PenaltyWeights {
    double eta = 0.0;
    double eta_prime = 0.0;
    double eta_double_prime = 0.0;

    static PenaltyWeights defaults_for(const TspInstance& inst);
};

// Plain-text model export. First line "vars <num> offset <value>", second
// line "form qubo|ising", then one line per nonzero term: "<i> <i> <h>" for
// linear/field terms and "<i> <j> <J>" with i<j for couplings. Full decimal
// precision. The variable map is not serialized.
void write_model(const QuadraticModel& m, std::ostream& out);
void write_model(const IsingModel& m, std::ostream& out);
// Reads either form back as the stored triple; `form` receives the header tag.
QuadraticModel read_model(std::istream& in, std::string& form);

} // namespace qatsp
