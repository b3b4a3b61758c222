#include "sqnf/circuit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sqnf/rng.hpp"

namespace sqnf {

GateClass gate_class_of(GateKind kind) {
    switch (kind) {
        case GateKind::CZ:
            return GateClass::TwoQubit;
        case GateKind::IdentitySlot:
            return GateClass::Identity;
        default:
            return GateClass::SingleQubit;
    }
}

std::string gate_kind_name(GateKind kind) {
    switch (kind) {
        case GateKind::RotationY: return "ry";
        case GateKind::Hadamard: return "h";
        case GateKind::CZ: return "cz";
        case GateKind::PauliX: return "x";
        case GateKind::PauliY: return "y";
        case GateKind::PauliZ: return "z";
        case GateKind::IdentitySlot: return "id";
    }
    throw std::logic_error("unknown gate kind");
}

ComplexMatrix givens_unitary(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
    double c = std::cos(theta), s = std::sin(theta);
    ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    m(1, 1) = c;
    m(1, 2) = -s;
    m(2, 1) = s;
    m(2, 2) = c;
    return m;
}

ComplexMatrix ry_matrix(double angle) {
    double c = std::cos(angle / 2), s = std::sin(angle / 2);
    ComplexMatrix m(2, 2);
    m << c, -s, s, c;
    return m;
}

ComplexMatrix hadamard_matrix() {
    double s = 1.0 / std::sqrt(2.0);
    ComplexMatrix m(2, 2);
    m << s, s, s, -s;
    return m;
}

ComplexMatrix cz_matrix() {
    ComplexMatrix m = ComplexMatrix::Identity(4, 4);
    m(3, 3) = -1.0;
    return m;
}

ComplexMatrix gate_matrix(const GateInstance& g) {
    const cplx i{0.0, 1.0};
    switch (g.kind) {
        case GateKind::RotationY:
            return ry_matrix(g.angle);
        case GateKind::Hadamard:
            return hadamard_matrix();
        case GateKind::CZ:
            return cz_matrix();
        case GateKind::PauliX: {
            ComplexMatrix m(2, 2);
            m << 0, 1, 1, 0;
            return m;
        }
        case GateKind::PauliY: {
            ComplexMatrix m(2, 2);
            m << 0, -i, i, 0;
            return m;
        }
        case GateKind::PauliZ: {
            ComplexMatrix m(2, 2);
            m << 1, 0, 0, -1;
            return m;
        }
        case GateKind::IdentitySlot:
            return identity_matrix(2);
    }
    throw std::logic_error("unknown gate kind");
}

std::vector<GateInstance> decompose_givens(double theta, int qubit_a, int qubit_b) {
    if (qubit_a == qubit_b) throw std::invalid_argument("rotation needs two distinct qubits");
    auto h = [&](int q) { return GateInstance{GateKind::Hadamard, {q}, 0.0}; };
    auto cz = [&]() { return GateInstance{GateKind::CZ, {qubit_a, qubit_b}, 0.0}; };
    auto ry = [&](double a) { return GateInstance{GateKind::RotationY, {qubit_a}, a}; };
    return {h(qubit_b), cz(), h(qubit_b), cz(),  ry(-theta),
            cz(),       ry(theta), h(qubit_b), cz(), h(qubit_b)};
}

Circuit build_ladder_circuit(int n_qubits, int n_layers, uint64_t seed) {
    if (n_qubits < 2) throw std::invalid_argument("ladder circuits need at least 2 qubits");
    if (n_layers < 0) throw std::invalid_argument("negative layer count");

    Circuit c;
    c.n_qubits = n_qubits;
    c.seed = seed;
    c.layers.reserve(static_cast<size_t>(n_layers));

    RngStream thetas(RngStream::derive(seed, stream_tag::theta));
    const double two_pi = 2.0 * std::numbers::pi;
    uint64_t draw = 0;
    for (int l = 0; l < n_layers; ++l) {
        Layer layer;
        for (int q = 0; q < n_qubits; ++q)
            layer.gates.push_back(GateInstance{GateKind::IdentitySlot, {q}, 0.0});
        for (int j = 0; j + 1 < n_qubits; ++j) {
            double theta = two_pi * thetas.uniform_at(draw++);
            layer.givens.push_back(GivensSpec{j, j + 1, theta});
            c.theta_list.push_back(theta);
            std::vector<GateInstance> run = decompose_givens(theta, j, j + 1);
            layer.gates.insert(layer.gates.end(), run.begin(), run.end());
        }
        c.layers.push_back(std::move(layer));
    }
    return c;
}

Circuit circuit_prefix(const Circuit& c, int n_layers) {
    if (n_layers < 0 || n_layers > c.depth())
        throw std::out_of_range("prefix length exceeds circuit depth");
    Circuit out;
    out.n_qubits = c.n_qubits;
    out.seed = c.seed;
    out.layers.assign(c.layers.begin(), c.layers.begin() + n_layers);
    for (const Layer& l : out.layers)
        for (const GivensSpec& g : l.givens) out.theta_list.push_back(g.theta);
    return out;
}

ComplexMatrix ideal_unitary(const Circuit& c) {
    long d = dim_for_qubits(c.n_qubits);
    ComplexMatrix u = identity_matrix(d);
    for (const Layer& l : c.layers)
        for (const GivensSpec& g : l.givens) {
            ComplexMatrix full =
                embed_operator(givens_unitary(g.theta), {g.qubit_a, g.qubit_b}, c.n_qubits);
            u = full * u;
        }
    return u;
}

namespace {

void apply_layer_in_place(ComplexVector& psi, const Layer& l, int n_qubits, long d) {
    for (const GivensSpec& g : l.givens) {
        double cth = std::cos(g.theta), sth = std::sin(g.theta);
        long mask_a = 1L << (n_qubits - 1 - g.qubit_a);
        long mask_b = 1L << (n_qubits - 1 - g.qubit_b);
        for (long i = 0; i < d; ++i) {
            if ((i & mask_a) || !(i & mask_b)) continue;
            long i01 = i;           // a=0, b=1
            long i10 = (i ^ mask_b) | mask_a;
            cplx v01 = psi(i01), v10 = psi(i10);
            psi(i01) = cth * v01 - sth * v10;
            psi(i10) = sth * v01 + cth * v10;
        }
    }
}

}  // namespace

ComplexVector ideal_statevector(const Circuit& c, long initial_basis_state) {
    long d = dim_for_qubits(c.n_qubits);
    if (initial_basis_state < 0 || initial_basis_state >= d)
        throw std::out_of_range("initial basis state out of range");
    ComplexVector psi = ComplexVector::Zero(d);
    psi(initial_basis_state) = 1.0;
    for (const Layer& l : c.layers) apply_layer_in_place(psi, l, c.n_qubits, d);
    return psi;
}

std::vector<ComplexVector> ideal_statevector_checkpoints(const Circuit& c,
                                                         long initial_basis_state,
                                                         const std::vector<int>& layer_checkpoints) {
    long d = dim_for_qubits(c.n_qubits);
    if (initial_basis_state < 0 || initial_basis_state >= d)
        throw std::out_of_range("initial basis state out of range");
    for (size_t k = 0; k < layer_checkpoints.size(); ++k) {
        int cp = layer_checkpoints[k];
        if (cp < 0 || cp > c.depth())
            throw std::out_of_range("checkpoint outside circuit depth");
        if (k > 0 && cp <= layer_checkpoints[k - 1])
            throw std::invalid_argument("checkpoints must be strictly ascending");
    }
    ComplexVector psi = ComplexVector::Zero(d);
    psi(initial_basis_state) = 1.0;
    std::vector<ComplexVector> out;
    out.reserve(layer_checkpoints.size());
    size_t next = 0;
    if (next < layer_checkpoints.size() && layer_checkpoints[next] == 0) {
        out.push_back(psi);
        ++next;
    }
    for (int layer = 0; layer < c.depth() && next < layer_checkpoints.size(); ++layer) {
        apply_layer_in_place(psi, c.layers[static_cast<size_t>(layer)], c.n_qubits, d);
        if (layer + 1 == layer_checkpoints[next]) {
            out.push_back(psi);
            ++next;
        }
    }
    return out;
}

std::string circuit_to_json(const Circuit& c) {
    nlohmann::json doc;
    doc["n_qubits"] = c.n_qubits;
    doc["seed"] = c.seed;
    nlohmann::json layers = nlohmann::json::array();
    for (const Layer& l : c.layers) {
        nlohmann::json gates = nlohmann::json::array();
        for (const GateInstance& g : l.gates)
            gates.push_back({{"kind", gate_kind_name(g.kind)},
                             {"targets", g.targets},
                             {"angle", g.angle}});
        layers.push_back(std::move(gates));
    }
    doc["layers"] = std::move(layers);
    return doc.dump(2);
}

}  // namespace sqnf
