#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "qatsp/encoding.hpp"
#include "qatsp/instance.hpp"
#include "qatsp/quadratic_model.hpp"

namespace qatsp {

// Dense statevector over up to 26 qubits, qubit q = bit q of the index.
struct QuantumState {
    int n_qubits = 0;
    std::vector<std::complex<double>> amp;

    static QuantumState computational_zero(int n);
    // |+>^count on the first `count` qubits, |0> on the rest.
    static QuantumState uniform(int n, int count);

    double norm() const;
};

// exp(i * angle * sigma_x) on each of the first `count` qubits (every qubit
// if count < 0). One annealing step uses angle = A(t) * dt, under which the
// uniform superposition (the driver ground state) only picks up a global
// phase.
void apply_driver(QuantumState& state, double angle, int count = -1);

// Multiplies each basis state |z> by exp(-i * scale * E(z)) where E is the
// model energy of the binary word z, applied term by term as global, single-
// and two-qubit phase gates.
void apply_problem_phase(QuantumState& state, const QuadraticModel& model, double scale);

enum class GadgetOrder { tree, ladder };

struct GadgetGate {
    enum class Kind { toffoli, cphase } kind;
    int control_a = 0, control_b = 0;
    bool polarity_a = true, polarity_b = true; // false = open circle (control on |0>)
    int target = 0;                            // toffoli only
};

// Conditional-phase gadget for one subtour inequality: multiplies by
// exp(-i theta) exactly those basis states whose cut qubits are all 0 (the
// subset is disconnected). AND-of-negations is accumulated into ancillas via
// 2(m-2) Toffolis (balanced tree or linear ladder), the phase is applied by
// one doubly-controlled phase gate, and the ancillas are uncomputed.
struct GadgetLayout {
    std::vector<int> x;       // cut-edge qubits, m >= 2
    std::vector<int> ancilla; // m-2 ancillas, must be in |0>
    double theta = 0.0;
    GadgetOrder order = GadgetOrder::tree;
    std::vector<GadgetGate> gates;

    GadgetLayout(std::vector<int> x, std::vector<int> ancilla, double theta,
                 GadgetOrder order = GadgetOrder::tree);

    int toffoli_count() const;
};

// Requires the ancillas to carry no amplitude outside |0> (checked to 1e-9).
void apply_subtour_gadget(QuantumState& state, const GadgetLayout& layout);

struct DigitalRunConfig {
    int steps = 0;
    double dt = 0.1;
    std::vector<std::pair<std::vector<int>, double>> subsets; // (city subset, eta')
    std::optional<PenaltyWeights> weights; // defaults_for(inst) if unset
    GadgetOrder order = GadgetOrder::tree;
    long long samples = 0;   // 0: exact probabilities
    std::uint64_t seed = 0;  // sampling mode only
};

struct DigitalResult {
    int num_problem_qubits = 0;
    VariableMap varmap;
    std::vector<double> probabilities; // indexed by edge-configuration word
    std::uint64_t most_probable = 0;
    DecodeResult decoded; // of the most probable configuration
};

// Trotterized annealing of the untruncated edge model: uniform initial
// superposition, then `steps` rounds of driver rotation (weight A), diagonal
// problem phase (weight B), and one gadget per registered subset, on the
// midpoint grid t_k = (k + 1/2)/steps with A = 1 - t_k, B = t_k. Exact mode
// is deterministic; outcome probabilities are exact.
DigitalResult run_digital_qa(const TspInstance& inst, const DigitalRunConfig& config);

struct GadgetResources {
    int m = 0;
    int ancillas = 0;
    int toffolis = 0;
    int depth = 0; // 2*ceil(log2 m)+1 levels; 1 for the m=2 degenerate case
};

struct DigitalResourceReport {
    int problem_qubits = 0; // n(n-1)/2 edge qubits
    std::vector<GadgetResources> gadgets;
};

DigitalResourceReport resource_report_digital(int n, const std::vector<int>& ms);

} // namespace qatsp
