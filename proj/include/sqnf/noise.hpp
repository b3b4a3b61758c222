#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sqnf/circuit.hpp"
#include "sqnf/linalg.hpp"
#include "sqnf/rng.hpp"

namespace sqnf {

struct NoiseChannel {
    std::vector<ComplexMatrix> kraus;  // 2x2 each
    std::string label;
};

// gamma conventions: depolarizing gamma is the probability of replacing the
// qubit state with I/2; damping gammas follow the standard Kraus forms.
NoiseChannel depolarizing_channel(double gamma);
NoiseChannel amplitude_damping_channel(double gamma_a);
NoiseChannel phase_damping_channel(double gamma_p);

struct DampingRates {
    double amp = 0.0;
    double phase = 0.0;
    bool operator==(const DampingRates&) const = default;
};

struct TwirlConfig {
    bool enabled = false;
    int n_instances = 20;
    uint64_t seed = 0;
    bool operator==(const TwirlConfig&) const = default;
};

struct NoiseSpec {
    double identity_depolarizing = 0.0;
    DampingRates single_qubit;
    DampingRates two_qubit;
    TwirlConfig twirl;
    bool operator==(const NoiseSpec&) const = default;
};

void validate_noise_spec(const NoiseSpec& spec);

// Flat executable form: interned operator tables plus an instruction list.
// layer_ends[k] is the instruction count after layer k, for checkpointed runs.
struct NoisyProgram {
    struct Instruction {
        enum class Kind : uint8_t { Unitary, Channel };
        enum class Tag : uint8_t {
            Composite,       // full two-qubit rotation
            Gate,            // compiled single-qubit gate
            CzGate,          // compiled CZ
            PauliFrame,      // twirl insertion, noise free
            IdentityNoise,   // depolarizing on an identity slot
            GateNoise        // damping after a gate
        };
        Kind kind;
        Tag tag;
        int table_index;
        std::vector<int> targets;
    };

    int n_qubits = 0;
    std::vector<ComplexMatrix> unitary_table;
    std::vector<NoiseChannel> channel_table;
    std::vector<Instruction> instructions;
    std::vector<size_t> layer_ends;

    int intern_unitary(const ComplexMatrix& m);
    int intern_channel(const NoiseChannel& ch);
};

// Composite flavor: each rotation runs as its exact 4x4 unitary, with the
// damping its compiled gates would suffer applied right after it, in compiled
// order. Identity slots carry depolarizing noise. Zero-rate channels are
// omitted.
NoisyProgram attach_noise(const Circuit& circuit, const NoiseSpec& spec);

// Literal flavor: every compiled gate is its own instruction followed by its
// damping. Required when Pauli frames must interleave with the CZs.
NoisyProgram attach_noise_gate_level(const Circuit& circuit, const NoiseSpec& spec);

// Pauli pair codes: index 0..15 = 4*p_a + p_b with 0=I, 1=X, 2=Y, 3=Z.
// Inserts the pair before each CZ and its CZ-conjugate after the CZ's noise,
// both as noise-free unitaries. pair_for(k) supplies the pair for the k-th CZ.
NoisyProgram pauli_twirl_cz(const NoisyProgram& program,
                            const std::function<int(size_t)>& pair_for);
NoisyProgram pauli_twirl_cz(const NoisyProgram& program, RngStream& stream);

// Unsigned conjugation rule: pair code -> pair code under CZ P CZ (global
// phase discarded).
int cz_conjugate_pauli_pair(int pair_code);

}  // namespace sqnf
