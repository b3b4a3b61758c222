#include "sqnf/noise.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sqnf {

namespace {

void check_rate(double gamma, const char* what) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw std::invalid_argument(std::string(what) + " rate must lie in [0,1]");
}

bool same_matrix(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(),
                       sizeof(cplx) * static_cast<size_t>(a.size())) == 0;
}

}  // namespace

NoiseChannel depolarizing_channel(double gamma) {
    check_rate(gamma, "depolarizing");
    const cplx i{0.0, 1.0};
    ComplexMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, -i, i, 0;
    z << 1, 0, 0, -1;
    double w0 = std::sqrt(1.0 - 0.75 * gamma), w = std::sqrt(0.25 * gamma);
    return NoiseChannel{{w0 * identity_matrix(2), w * x, w * y, w * z}, "depolarizing"};
}

NoiseChannel amplitude_damping_channel(double gamma_a) {
    check_rate(gamma_a, "amplitude damping");
    ComplexMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma_a);
    k1 << 0, std::sqrt(gamma_a), 0, 0;
    return NoiseChannel{{k0, k1}, "amp_damp"};
}

NoiseChannel phase_damping_channel(double gamma_p) {
    check_rate(gamma_p, "phase damping");
    ComplexMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma_p);
    k1 << 0, 0, 0, std::sqrt(gamma_p);
    return NoiseChannel{{k0, k1}, "phase_damp"};
}

void validate_noise_spec(const NoiseSpec& spec) {
    check_rate(spec.identity_depolarizing, "identity depolarizing");
    check_rate(spec.single_qubit.amp, "single-qubit amplitude");
    check_rate(spec.single_qubit.phase, "single-qubit phase");
    check_rate(spec.two_qubit.amp, "two-qubit amplitude");
    check_rate(spec.two_qubit.phase, "two-qubit phase");
    if (spec.twirl.enabled && spec.twirl.n_instances < 1)
        throw std::invalid_argument("twirl needs at least one instance");
}

int NoisyProgram::intern_unitary(const ComplexMatrix& m) {
    for (size_t i = 0; i < unitary_table.size(); ++i)
        if (same_matrix(unitary_table[i], m)) return static_cast<int>(i);
    unitary_table.push_back(m);
    return static_cast<int>(unitary_table.size()) - 1;
}

int NoisyProgram::intern_channel(const NoiseChannel& ch) {
    for (size_t i = 0; i < channel_table.size(); ++i) {
        const NoiseChannel& c = channel_table[i];
        if (c.label != ch.label || c.kraus.size() != ch.kraus.size()) continue;
        bool all = true;
        for (size_t k = 0; k < c.kraus.size(); ++k)
            if (!same_matrix(c.kraus[k], ch.kraus[k])) all = false;
        if (all) return static_cast<int>(i);
    }
    channel_table.push_back(ch);
    return static_cast<int>(channel_table.size()) - 1;
}

namespace {

using Instr = NoisyProgram::Instruction;

struct ChannelIds {
    int depol = -1;
    int amp1 = -1, phase1 = -1;
    int amp2 = -1, phase2 = -1;
};

ChannelIds intern_spec_channels(NoisyProgram& p, const NoiseSpec& spec) {
    ChannelIds ids;
    if (spec.identity_depolarizing > 0.0)
        ids.depol = p.intern_channel(depolarizing_channel(spec.identity_depolarizing));
    if (spec.single_qubit.amp > 0.0)
        ids.amp1 = p.intern_channel(amplitude_damping_channel(spec.single_qubit.amp));
    if (spec.single_qubit.phase > 0.0)
        ids.phase1 = p.intern_channel(phase_damping_channel(spec.single_qubit.phase));
    if (spec.two_qubit.amp > 0.0)
        ids.amp2 = p.intern_channel(amplitude_damping_channel(spec.two_qubit.amp));
    if (spec.two_qubit.phase > 0.0)
        ids.phase2 = p.intern_channel(phase_damping_channel(spec.two_qubit.phase));
    return ids;
}

void emit_gate_damping(NoisyProgram& p, const ChannelIds& ids, const GateInstance& g) {
    switch (g.gate_class()) {
        case GateClass::SingleQubit:
            if (ids.amp1 >= 0)
                p.instructions.push_back(
                    {Instr::Kind::Channel, Instr::Tag::GateNoise, ids.amp1, g.targets});
            if (ids.phase1 >= 0)
                p.instructions.push_back(
                    {Instr::Kind::Channel, Instr::Tag::GateNoise, ids.phase1, g.targets});
            break;
        case GateClass::TwoQubit:
            for (int q : g.targets) {
                if (ids.amp2 >= 0)
                    p.instructions.push_back(
                        {Instr::Kind::Channel, Instr::Tag::GateNoise, ids.amp2, {q}});
                if (ids.phase2 >= 0)
                    p.instructions.push_back(
                        {Instr::Kind::Channel, Instr::Tag::GateNoise, ids.phase2, {q}});
            }
            break;
        case GateClass::Identity:
            break;
    }
}

void emit_identity_noise(NoisyProgram& p, const ChannelIds& ids, const GateInstance& g) {
    if (ids.depol >= 0)
        p.instructions.push_back(
            {Instr::Kind::Channel, Instr::Tag::IdentityNoise, ids.depol, g.targets});
}

}  // namespace

NoisyProgram attach_noise(const Circuit& circuit, const NoiseSpec& spec) {
    validate_noise_spec(spec);
    NoisyProgram p;
    p.n_qubits = circuit.n_qubits;
    ChannelIds ids = intern_spec_channels(p, spec);

    for (const Layer& layer : circuit.layers) {
        for (const GateInstance& g : layer.gates)
            if (g.kind == GateKind::IdentitySlot) emit_identity_noise(p, ids, g);
        for (const GivensSpec& gs : layer.givens) {
            int u = p.intern_unitary(givens_unitary(gs.theta));
            p.instructions.push_back({Instr::Kind::Unitary, Instr::Tag::Composite, u,
                                      {gs.qubit_a, gs.qubit_b}});
            for (const GateInstance& g : decompose_givens(gs.theta, gs.qubit_a, gs.qubit_b))
                emit_gate_damping(p, ids, g);
        }
        p.layer_ends.push_back(p.instructions.size());
    }
    return p;
}

NoisyProgram attach_noise_gate_level(const Circuit& circuit, const NoiseSpec& spec) {
    validate_noise_spec(spec);
    NoisyProgram p;
    p.n_qubits = circuit.n_qubits;
    ChannelIds ids = intern_spec_channels(p, spec);

    for (const Layer& layer : circuit.layers) {
        for (const GateInstance& g : layer.gates) {
            if (g.kind == GateKind::IdentitySlot) {
                emit_identity_noise(p, ids, g);
                continue;
            }
            int u = p.intern_unitary(gate_matrix(g));
            Instr::Tag tag = g.kind == GateKind::CZ ? Instr::Tag::CzGate : Instr::Tag::Gate;
            p.instructions.push_back({Instr::Kind::Unitary, tag, u, g.targets});
            emit_gate_damping(p, ids, g);
        }
        p.layer_ends.push_back(p.instructions.size());
    }
    return p;
}

int cz_conjugate_pauli_pair(int pair_code) {
    int pa = (pair_code >> 2) & 3, pb = pair_code & 3;
    auto flips = [](int pauli) { return pauli == 1 || pauli == 2; };
    // unsigned Pauli product is index XOR under the coding I,X,Y,Z = 0,1,2,3
    int qa = flips(pb) ? (pa ^ 3) : pa;
    int qb = flips(pa) ? (pb ^ 3) : pb;
    return (qa << 2) | qb;
}

NoisyProgram pauli_twirl_cz(const NoisyProgram& program,
                            const std::function<int(size_t)>& pair_for) {
    NoisyProgram p;
    p.n_qubits = program.n_qubits;
    p.unitary_table = program.unitary_table;
    p.channel_table = program.channel_table;

    auto pauli_matrix_of = [](int code) {
        const cplx i{0.0, 1.0};
        ComplexMatrix m(2, 2);
        switch (code) {
            case 1: m << 0, 1, 1, 0; break;
            case 2: m << 0, -i, i, 0; break;
            case 3: m << 1, 0, 0, -1; break;
            default: throw std::logic_error("identity pauli should not be emitted");
        }
        return m;
    };
    auto emit_pair = [&](int code, const std::vector<int>& cz_targets) {
        int pa = (code >> 2) & 3, pb = code & 3;
        if (pa != 0)
            p.instructions.push_back({Instr::Kind::Unitary, Instr::Tag::PauliFrame,
                                      p.intern_unitary(pauli_matrix_of(pa)), {cz_targets[0]}});
        if (pb != 0)
            p.instructions.push_back({Instr::Kind::Unitary, Instr::Tag::PauliFrame,
                                      p.intern_unitary(pauli_matrix_of(pb)), {cz_targets[1]}});
    };

    size_t cz_index = 0;
    size_t next_layer = 0;
    for (size_t i = 0; i < program.instructions.size(); ++i) {
        const Instr& ins = program.instructions[i];
        if (ins.tag != Instr::Tag::CzGate) {
            p.instructions.push_back(ins);
        } else {
            int code = pair_for(cz_index++);
            if (code < 0 || code > 15) throw std::out_of_range("pauli pair code out of range");
            emit_pair(code, ins.targets);
            p.instructions.push_back(ins);
            // the CZ's own damping follows immediately; keep it inside the frame
            while (i + 1 < program.instructions.size() &&
                   program.instructions[i + 1].kind == Instr::Kind::Channel &&
                   program.instructions[i + 1].tag == Instr::Tag::GateNoise) {
                // stop at a layer boundary so layer_ends stays meaningful
                if (next_layer < program.layer_ends.size() &&
                    i + 1 == program.layer_ends[next_layer])
                    break;
                p.instructions.push_back(program.instructions[++i]);
            }
            emit_pair(cz_conjugate_pauli_pair(code), ins.targets);
        }
        while (next_layer < program.layer_ends.size() &&
               i + 1 == program.layer_ends[next_layer]) {
            p.layer_ends.push_back(p.instructions.size());
            ++next_layer;
        }
    }
    return p;
}

NoisyProgram pauli_twirl_cz(const NoisyProgram& program, RngStream& stream) {
    return pauli_twirl_cz(program, [&stream](size_t) {
        return static_cast<int>(stream.next_below(16));
    });
}

}  // namespace sqnf
