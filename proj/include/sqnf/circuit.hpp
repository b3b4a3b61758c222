#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqnf/linalg.hpp"

namespace sqnf {

enum class GateKind { RotationY, Hadamard, CZ, PauliX, PauliY, PauliZ, IdentitySlot };
enum class GateClass { SingleQubit, TwoQubit, Identity };

GateClass gate_class_of(GateKind kind);
std::string gate_kind_name(GateKind kind);

struct GateInstance {
    GateKind kind;
    std::vector<int> targets;  // 1 entry, or 2 for CZ
    double angle = 0.0;        // RotationY only

    GateClass gate_class() const { return gate_class_of(kind); }
};

// One excitation-preserving rotation on an adjacent qubit pair.
struct GivensSpec {
    int qubit_a;
    int qubit_b;
    double theta;
};

// A layer stores both views of the same physical content: the compiled gate
// list (identity slots, then the expanded rotation sequences) and the
// composite rotations those sequences realize.
struct Layer {
    std::vector<GateInstance> gates;
    std::vector<GivensSpec> givens;
};

struct Circuit {
    int n_qubits = 0;
    uint64_t seed = 0;
    std::vector<Layer> layers;
    std::vector<double> theta_list;

    int depth() const { return static_cast<int>(layers.size()); }
};

// Local gate matrices. givens_unitary orders the two targets with the first
// qubit as the most significant local bit.
ComplexMatrix givens_unitary(double theta);
ComplexMatrix ry_matrix(double angle);
ComplexMatrix hadamard_matrix();
ComplexMatrix cz_matrix();
ComplexMatrix gate_matrix(const GateInstance& g);

// Canonical compiled form of G(theta) on (qubit_a, qubit_b), in application
// order: H(b), CZ, H(b), CZ, Ry(-theta)@a, CZ, Ry(theta)@a, H(b), CZ, H(b).
std::vector<GateInstance> decompose_givens(double theta, int qubit_a, int qubit_b);

Circuit build_ladder_circuit(int n_qubits, int n_layers, uint64_t seed);
Circuit circuit_prefix(const Circuit& c, int n_layers);

// Product of embedded composite rotations in application order (identity
// slots contribute nothing).
ComplexMatrix ideal_unitary(const Circuit& c);

// Same evolution applied to a basis-state vector; O(d) per rotation.
ComplexVector ideal_statevector(const Circuit& c, long initial_basis_state);

// One incremental pass capturing the state after each requested layer count
// (ascending; 0 means the initial state).
std::vector<ComplexVector> ideal_statevector_checkpoints(const Circuit& c,
                                                         long initial_basis_state,
                                                         const std::vector<int>& layer_checkpoints);

std::string circuit_to_json(const Circuit& c);

}  // namespace sqnf
