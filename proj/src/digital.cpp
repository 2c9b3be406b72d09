#include "qatsp/digital.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qatsp/errors.hpp"
#include "qatsp/rng.hpp"

namespace qatsp {

namespace {

void check_capacity(int n) {
    if (n < 1 || n > 26)
        throw capacity_error("statevector capacity is 26 qubits, requested " + std::to_string(n));
}

} // namespace

QuantumState QuantumState::computational_zero(int n) {
    check_capacity(n);
    QuantumState s;
    s.n_qubits = n;
    s.amp.assign(std::size_t{1} << n, {0.0, 0.0});
    s.amp[0] = 1.0;
    return s;
}

QuantumState QuantumState::uniform(int n, int count) {
    check_capacity(n);
    if (count < 0 || count > n) throw std::invalid_argument("uniform: bad qubit count");
    QuantumState s;
    s.n_qubits = n;
    s.amp.assign(std::size_t{1} << n, {0.0, 0.0});
    const double a = std::pow(2.0, -0.5 * count);
    const std::size_t block = std::size_t{1} << count;
    for (std::size_t z = 0; z < block; ++z) s.amp[z] = a;
    return s;
}

double QuantumState::norm() const {
    double sum = 0.0;
    for (const auto& a : amp) sum += std::norm(a);
    return std::sqrt(sum);
}

void apply_driver(QuantumState& state, double angle, int count) {
    const int nq = count < 0 ? state.n_qubits : count;
    if (nq > state.n_qubits) throw std::invalid_argument("apply_driver: bad qubit count");
    const double c = std::cos(angle);
    const std::complex<double> is(0.0, std::sin(angle));
    const std::size_t dim = state.amp.size();
    for (int q = 0; q < nq; ++q) {
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t z = 0; z < dim; ++z) {
            if (z & bit) continue;
            const auto a0 = state.amp[z];
            const auto a1 = state.amp[z | bit];
            state.amp[z] = c * a0 + is * a1;
            state.amp[z | bit] = is * a0 + c * a1;
        }
    }
}

void apply_problem_phase(QuantumState& state, const QuadraticModel& model, double scale) {
    if (model.num_vars > state.n_qubits)
        throw std::invalid_argument("apply_problem_phase: model larger than the state");
    const std::size_t dim = state.amp.size();

    const std::complex<double> global = std::polar(1.0, -scale * model.offset);
    for (auto& a : state.amp) a *= global;

    for (int i = 0; i < model.num_vars; ++i) {
        if (model.linear[i] == 0.0) continue;
        const std::complex<double> phase = std::polar(1.0, -scale * model.linear[i]);
        const std::size_t bit = std::size_t{1} << i;
        for (std::size_t z = 0; z < dim; ++z)
            if (z & bit) state.amp[z] *= phase;
    }
    for (const auto& [key, q] : model.quadratic) {
        if (q == 0.0) continue;
        const std::complex<double> phase = std::polar(1.0, -scale * q);
        const std::size_t mask =
            (std::size_t{1} << key.first) | (std::size_t{1} << key.second);
        for (std::size_t z = 0; z < dim; ++z)
            if ((z & mask) == mask) state.amp[z] *= phase;
    }
}

GadgetLayout::GadgetLayout(std::vector<int> x_in, std::vector<int> ancilla_in, double theta_in,
                           GadgetOrder order_in)
    : x(std::move(x_in)), ancilla(std::move(ancilla_in)), theta(theta_in), order(order_in) {
    const int m = static_cast<int>(x.size());
    if (m < 2) throw std::invalid_argument("gadget: need m >= 2 connection qubits");
    if (static_cast<int>(ancilla.size()) != m - 2)
        throw std::invalid_argument("gadget: need exactly m-2 ancillas, got " +
                                    std::to_string(ancilla.size()));
    {
        std::vector<int> all = x;
        all.insert(all.end(), ancilla.begin(), ancilla.end());
        std::sort(all.begin(), all.end());
        if (std::adjacent_find(all.begin(), all.end()) != all.end())
            throw std::invalid_argument("gadget: qubit indices must be disjoint");
    }

    // Reduce the m open-controlled conditions to two by AND-ing pairs into
    // ancillas; the last two condition the phase gate directly.
    struct Term {
        int qubit;
        bool polarity; // false: condition on |0>
    };
    std::vector<Term> terms;
    for (int q : x) terms.push_back({q, false});
    std::vector<GadgetGate> compute;
    std::size_t next_ancilla = 0;
    while (terms.size() > 2) {
        std::vector<Term> reduced;
        if (order == GadgetOrder::tree) {
            // one balanced level: pair adjacent terms
            for (std::size_t i = 0; i + 1 < terms.size(); i += 2) {
                const int anc = ancilla[next_ancilla++];
                compute.push_back({GadgetGate::Kind::toffoli, terms[i].qubit, terms[i + 1].qubit,
                                   terms[i].polarity, terms[i + 1].polarity, anc});
                reduced.push_back({anc, true});
            }
            if (terms.size() % 2) reduced.push_back(terms.back());
        } else {
            const int anc = ancilla[next_ancilla++];
            compute.push_back({GadgetGate::Kind::toffoli, terms[0].qubit, terms[1].qubit,
                               terms[0].polarity, terms[1].polarity, anc});
            reduced.push_back({anc, true});
            reduced.insert(reduced.end(), terms.begin() + 2, terms.end());
        }
        terms = std::move(reduced);
    }

    gates = compute;
    gates.push_back({GadgetGate::Kind::cphase, terms[0].qubit, terms[1].qubit, terms[0].polarity,
                     terms[1].polarity, 0});
    for (auto it = compute.rbegin(); it != compute.rend(); ++it) gates.push_back(*it);
}

int GadgetLayout::toffoli_count() const {
    int count = 0;
    for (const auto& g : gates)
        if (g.kind == GadgetGate::Kind::toffoli) ++count;
    return count;
}

void apply_subtour_gadget(QuantumState& state, const GadgetLayout& layout) {
    const std::size_t dim = state.amp.size();

    // precondition: no amplitude support outside ancilla |0>
    std::size_t anc_mask = 0;
    for (int q : layout.ancilla) anc_mask |= std::size_t{1} << q;
    double stray = 0.0;
    for (std::size_t z = 0; z < dim; ++z)
        if (z & anc_mask) stray += std::norm(state.amp[z]);
    if (stray > 1e-9)
        throw std::invalid_argument("apply_subtour_gadget: ancillas are not in |0>");

    const std::complex<double> phase = std::polar(1.0, -layout.theta);
    for (const auto& g : layout.gates) {
        const std::size_t bit_a = std::size_t{1} << g.control_a;
        const std::size_t bit_b = std::size_t{1} << g.control_b;
        if (g.kind == GadgetGate::Kind::toffoli) {
            const std::size_t target = std::size_t{1} << g.target;
            for (std::size_t z = 0; z < dim; ++z) {
                if (z & target) continue;
                if (static_cast<bool>(z & bit_a) != g.polarity_a) continue;
                if (static_cast<bool>(z & bit_b) != g.polarity_b) continue;
                std::swap(state.amp[z], state.amp[z | target]);
            }
        } else {
            for (std::size_t z = 0; z < dim; ++z) {
                if (static_cast<bool>(z & bit_a) != g.polarity_a) continue;
                if (static_cast<bool>(z & bit_b) != g.polarity_b) continue;
                state.amp[z] *= phase;
            }
        }
    }
}

DigitalResult run_digital_qa(const TspInstance& inst, const DigitalRunConfig& config) {
    if (config.steps < 0) throw std::invalid_argument("run_digital_qa: steps must be >= 0");
    if (config.dt <= 0.0) throw std::invalid_argument("run_digital_qa: dt must be positive");
    const PenaltyWeights w =
        config.weights ? *config.weights : PenaltyWeights::defaults_for(inst);
    const QuadraticModel model = encode_edge(inst, w);
    const int nq = model.num_vars;

    // gadget connection qubits: retained cut edges per registered subset
    struct Gadget {
        std::vector<int> cut_vars;
        double eta_prime;
    };
    std::vector<Gadget> gadgets;
    int max_ancillas = 0;
    for (const auto& [subset, eta_prime] : config.subsets) {
        std::vector<char> in_subset(inst.n, 0);
        for (int c : subset) {
            if (c < 0 || c >= inst.n)
                throw std::invalid_argument("run_digital_qa: subset city out of range");
            in_subset[c] = 1;
        }
        Gadget g;
        g.eta_prime = eta_prime;
        for (std::size_t e = 0; e < model.varmap.edges.size(); ++e) {
            const auto [i, j] = model.varmap.edges[e];
            if (in_subset[i] != in_subset[j]) g.cut_vars.push_back(static_cast<int>(e));
        }
        if (g.cut_vars.size() < 2)
            throw std::invalid_argument("run_digital_qa: subset cut has fewer than 2 edges");
        max_ancillas = std::max(max_ancillas, static_cast<int>(g.cut_vars.size()) - 2);
        gadgets.push_back(std::move(g));
    }

    const int total_qubits = nq + max_ancillas;
    if (total_qubits > 26)
        throw capacity_error("run_digital_qa: " + std::to_string(total_qubits) +
                             " qubits exceed the statevector capacity of 26");

    // shared ancilla block; every gadget restores it to |0>
    std::vector<GadgetLayout> layouts;
    for (const auto& g : gadgets) {
        std::vector<int> anc(static_cast<std::size_t>(g.cut_vars.size()) - 2);
        for (std::size_t k = 0; k < anc.size(); ++k) anc[k] = nq + static_cast<int>(k);
        layouts.emplace_back(g.cut_vars, std::move(anc), 0.0, config.order);
    }

    QuantumState state = QuantumState::uniform(total_qubits, nq);
    for (int k = 0; k < config.steps; ++k) {
        const double t = (static_cast<double>(k) + 0.5) / config.steps;
        const double a = 1.0 - t;
        const double b = t;
        apply_driver(state, a * config.dt, nq);
        apply_problem_phase(state, model, b * config.dt);
        for (std::size_t gi = 0; gi < layouts.size(); ++gi) {
            layouts[gi].theta = b * gadgets[gi].eta_prime * config.dt;
            apply_subtour_gadget(state, layouts[gi]);
        }
    }

    DigitalResult result;
    result.num_problem_qubits = nq;
    result.varmap = model.varmap;
    const std::size_t problem_dim = std::size_t{1} << nq;
    result.probabilities.assign(problem_dim, 0.0);
    for (std::size_t z = 0; z < state.amp.size(); ++z)
        result.probabilities[z & (problem_dim - 1)] += std::norm(state.amp[z]);

    if (config.samples > 0) {
        // optional sampling mode: replace exact probabilities by an empirical
        // histogram of `samples` draws
        rng64 gen(config.seed);
        std::vector<double> cdf(problem_dim);
        double acc = 0.0;
        for (std::size_t z = 0; z < problem_dim; ++z) {
            acc += result.probabilities[z];
            cdf[z] = acc;
        }
        std::vector<double> counts(problem_dim, 0.0);
        for (long long s = 0; s < config.samples; ++s) {
            const double u = uniform_double(gen) * acc;
            const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            counts[static_cast<std::size_t>(it - cdf.begin())] += 1.0;
        }
        for (auto& c : counts) c /= static_cast<double>(config.samples);
        result.probabilities = std::move(counts);
    }

    std::size_t argmax = 0;
    for (std::size_t z = 1; z < problem_dim; ++z)
        if (result.probabilities[z] > result.probabilities[argmax]) argmax = z;
    result.most_probable = argmax;
    std::vector<std::uint8_t> bits(nq, 0);
    for (int i = 0; i < nq; ++i) bits[i] = (argmax >> i) & 1;
    result.decoded = decode(bits, model.varmap, inst);
    return result;
}

DigitalResourceReport resource_report_digital(int n, const std::vector<int>& ms) {
    DigitalResourceReport report;
    report.problem_qubits = n * (n - 1) / 2;
    for (int m : ms) {
        if (m < 2) throw std::invalid_argument("resource_report_digital: m must be >= 2");
        GadgetResources r;
        r.m = m;
        r.ancillas = m - 2;
        r.toffolis = 2 * (m - 2);
        if (m == 2) {
            r.depth = 1;
        } else {
            int levels = 0;
            while ((1 << levels) < m) ++levels; // ceil(log2 m)
            r.depth = 2 * levels + 1;
        }
        report.gadgets.push_back(r);
    }
    return report;
}

} // namespace qatsp
