#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qatsp/instance.hpp"
#include "qatsp/oracles.hpp"
#include "qatsp/quadratic_model.hpp"

namespace qatsp {

// Permutation mapping: grid variables a_ik (city i visited at timestep k),
// tour-length couplings between consecutive timesteps (cyclic), and one
// squared penalty per row and column sum. `reduced` pins city 0 to timestep 0
// and drops its row and column, giving the (n-1)^2-variable grid.
// Requires w.eta >= max d_ij / 2.
QuadraticModel encode_permutation(const TspInstance& inst, const PenaltyWeights& w, bool reduced);

// Edge mapping: one variable per retained undirected edge, linear cost d_ij,
// and a squared degree-2 penalty per city. L truncates to the union of each
// city's L nearest neighbors.
QuadraticModel encode_edge(const TspInstance& inst, const PenaltyWeights& w,
                           std::optional<int> L = std::nullopt);

// Adds eta_prime * (C - sum of cut edges)^2 for the cut between `subset` and
// its complement, C in {2,3}. Edges truncated out of the model are silently
// missing from the cut sum; a fully truncated cut leaves a warning on the
// model and only contributes the constant.
void add_subtour_penalty(QuadraticModel& model, const std::vector<int>& subset, int C,
                         double eta_prime);

// Slack form: appends |subset| new binary slack variables s_1..s_m and adds
//   eta_prime * (cut_sum - sum_k 2k s_k)^2 + eta_double_prime * (sum_k s_k - 1)^2.
void add_slack_subtour_penalty(QuadraticModel& model, const std::vector<int>& subset,
                               double eta_prime, double eta_double_prime);

// Exact spin-variable form under a = (1 - sigma)/2.
IsingModel to_ising(const QuadraticModel& model);

struct ConstraintViolation {
    enum class Kind { row, column, degree };
    Kind kind;
    int index = 0; // city (row/degree) or timestep (column)
    int value = 0; // observed sum/degree
};

struct ViolationReport {
    std::vector<ConstraintViolation> violations;
    std::string to_string() const;
};

using DecodeResult = std::variant<Tour, CycleCover, ViolationReport>;

// Structured solution behind a configuration: a Tour (valid permutation, or a
// single-cycle edge set), a CycleCover (multi-cycle edge set), or a
// ViolationReport naming each violated row/column/degree constraint. Slack
// variables, if present, are ignored.
DecodeResult decode(const std::vector<std::uint8_t>& config, const VariableMap& varmap,
                    const TspInstance& inst);

struct ResourceCounts {
    int qubits = 0;
    int couplers = 0; // nonzero pairwise terms
};
ResourceCounts resource_counts(const QuadraticModel& model);

// The resource formulas as stated for the two mappings: permutation (N-1)^2
// reduced / N^2 full qubits with (N-2)(N-1)^2 + N^2(N-1) couplers quoted for
// the full grid; edge N(N-1)/2 qubits, NL/2 when truncated. The quoted
// coupler/truncation formulas are estimates and can differ from the counts
// of a constructed model (see resource_counts).
long long permutation_qubit_formula(int n, bool reduced);
long long permutation_coupler_formula(int n);
long long edge_qubit_formula(int n, std::optional<int> L = std::nullopt);

// Hamming distance between the full-grid permutation encodings of `tour` and
// the same tour with positions [first..last] reversed.
int flips_for_2opt_permutation(const Tour& tour, int first, int last);

// A k-opt move on the edge mapping always flips exactly 2k edge variables.
int flips_for_kopt_edge(int k);

// Worst-case single-spin flips to resolve r crossings under the permutation
// mapping: 2 * (N - ceil((N - (r-1)) / (r+1))).
int worst_case_crossing_flips(int n, int r);

} // namespace qatsp
