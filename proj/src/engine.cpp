#include "sqnf/engine.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace sqnf {

namespace {

using Instr = NoisyProgram::Instruction;
using CacheKey = std::pair<int, std::vector<int>>;

void validate_program(const NoisyProgram& p) {
    for (const ComplexMatrix& u : p.unitary_table)
        if (!is_unitary(u, 1e-10)) throw std::invalid_argument("program table holds a non-unitary");
    for (const NoiseChannel& ch : p.channel_table)
        if (!kraus_complete(ch.kraus, 1e-10))
            throw std::invalid_argument("program table holds an incomplete channel");
    for (const Instr& ins : p.instructions) {
        size_t limit = ins.kind == Instr::Kind::Unitary ? p.unitary_table.size()
                                                        : p.channel_table.size();
        if (ins.table_index < 0 || static_cast<size_t>(ins.table_index) >= limit)
            throw std::invalid_argument("instruction references a missing table entry");
        for (int q : ins.targets)
            if (q < 0 || q >= p.n_qubits)
                throw std::invalid_argument("instruction targets a missing qubit");
    }
}

// Per-run cache of embedded operators. Channels are always cached; unitary
// entries only when the identical (table index, targets) pair occurs again.
struct EmbedCache {
    const NoisyProgram& program;
    std::map<CacheKey, int> unitary_uses;
    std::map<CacheKey, ComplexMatrix> unitaries;
    std::map<CacheKey, std::vector<ComplexMatrix>> channels;

    explicit EmbedCache(const NoisyProgram& p) : program(p) {
        for (const Instr& ins : p.instructions)
            if (ins.kind == Instr::Kind::Unitary)
                ++unitary_uses[{ins.table_index, ins.targets}];
    }

    const ComplexMatrix* unitary(const Instr& ins, ComplexMatrix& scratch) {
        CacheKey key{ins.table_index, ins.targets};
        const ComplexMatrix& local =
            program.unitary_table[static_cast<size_t>(ins.table_index)];
        if (unitary_uses.at(key) < 2) {
            scratch = embed_operator(local, ins.targets, program.n_qubits);
            return &scratch;
        }
        auto it = unitaries.find(key);
        if (it == unitaries.end())
            it = unitaries.emplace(key, embed_operator(local, ins.targets, program.n_qubits))
                     .first;
        return &it->second;
    }

    const std::vector<ComplexMatrix>& channel(const Instr& ins) {
        CacheKey key{ins.table_index, ins.targets};
        auto it = channels.find(key);
        if (it == channels.end()) {
            std::vector<ComplexMatrix> embedded;
            for (const ComplexMatrix& k :
                 program.channel_table[static_cast<size_t>(ins.table_index)].kraus)
                embedded.push_back(embed_operator(k, ins.targets, program.n_qubits));
            it = channels.emplace(key, std::move(embedded)).first;
        }
        return it->second;
    }
};

struct ExecState {
    ComplexMatrix rho;
    ComplexMatrix tmp;
    ComplexMatrix acc;
};

void execute_range(ExecState& st, const NoisyProgram& p, EmbedCache& cache, size_t from,
                   size_t to) {
    ComplexMatrix scratch;
    for (size_t i = from; i < to; ++i) {
        const Instr& ins = p.instructions[i];
        if (ins.kind == Instr::Kind::Unitary) {
            const ComplexMatrix* u = cache.unitary(ins, scratch);
            st.tmp.noalias() = (*u) * st.rho;
            st.rho.noalias() = st.tmp * u->adjoint();
        } else {
            st.acc.setZero();
            for (const ComplexMatrix& k : cache.channel(ins)) {
                st.tmp.noalias() = k * st.rho;
                st.acc.noalias() += st.tmp * k.adjoint();
            }
            std::swap(st.rho, st.acc);
        }
    }
}

ExecState init_state(const NoisyProgram& p, long initial_basis_state) {
    long d = dim_for_qubits(p.n_qubits);
    if (initial_basis_state < 0 || initial_basis_state >= d)
        throw std::out_of_range("initial basis state out of range");
    ExecState st;
    st.rho = ComplexMatrix::Zero(d, d);
    st.rho(initial_basis_state, initial_basis_state) = 1.0;
    st.tmp = ComplexMatrix::Zero(d, d);
    st.acc = ComplexMatrix::Zero(d, d);
    return st;
}

std::vector<double> pops_of(const ComplexMatrix& rho) {
    std::vector<double> pops(static_cast<size_t>(rho.rows()));
    for (Eigen::Index i = 0; i < rho.rows(); ++i) {
        double v = rho(i, i).real();
        pops[static_cast<size_t>(i)] = std::abs(v) < 1e-14 ? 0.0 : v;
    }
    return pops;
}

}  // namespace

SimResult run(const NoisyProgram& program, long initial_basis_state, const RunOptions& opts) {
    validate_program(program);
    EmbedCache cache(program);
    ExecState st = init_state(program, initial_basis_state);
    execute_range(st, program, cache, 0, program.instructions.size());

    SimResult result;
    result.exact_pops = pops_of(st.rho);
    if (opts.keep_final_rho)
        result.final_rho = DensityMatrix{program.n_qubits, std::move(st.rho)};
    return result;
}

std::vector<std::vector<double>> run_with_checkpoints(const NoisyProgram& program,
                                                      long initial_basis_state,
                                                      const std::vector<int>& layer_checkpoints) {
    validate_program(program);
    for (size_t i = 0; i < layer_checkpoints.size(); ++i) {
        int c = layer_checkpoints[i];
        if (c < 0 || static_cast<size_t>(c) > program.layer_ends.size())
            throw std::out_of_range("checkpoint beyond program depth");
        if (i > 0 && c <= layer_checkpoints[i - 1])
            throw std::invalid_argument("checkpoints must ascend");
    }

    EmbedCache cache(program);
    ExecState st = init_state(program, initial_basis_state);
    std::vector<std::vector<double>> out;
    out.reserve(layer_checkpoints.size());
    size_t cursor = 0;
    for (int c : layer_checkpoints) {
        size_t end = c == 0 ? 0 : program.layer_ends[static_cast<size_t>(c) - 1];
        execute_range(st, program, cache, cursor, end);
        cursor = end;
        out.push_back(pops_of(st.rho));
    }
    return out;
}

SimResult run_twirled(const Circuit& circuit, const NoiseSpec& spec, long initial_basis_state) {
    if (!spec.twirl.enabled) throw std::invalid_argument("twirling is disabled in this spec");
    std::vector<int> full = {circuit.depth()};
    std::vector<std::vector<double>> pops =
        run_twirled_with_checkpoints(circuit, spec, initial_basis_state, full);
    SimResult result;
    result.exact_pops = std::move(pops.back());
    result.twirl_instances_used = spec.twirl.n_instances;
    return result;
}

std::vector<std::vector<double>> run_twirled_with_checkpoints(
    const Circuit& circuit, const NoiseSpec& spec, long initial_basis_state,
    const std::vector<int>& layer_checkpoints) {
    if (!spec.twirl.enabled) throw std::invalid_argument("twirling is disabled in this spec");
    NoisyProgram base = attach_noise_gate_level(circuit, spec);

    std::vector<std::vector<double>> acc;
    for (int k = 0; k < spec.twirl.n_instances; ++k) {
        RngStream stream(RngStream::derive_path(
            spec.twirl.seed, {stream_tag::twirl, static_cast<uint64_t>(k)}));
        NoisyProgram instance = pauli_twirl_cz(base, stream);
        std::vector<std::vector<double>> pops =
            run_with_checkpoints(instance, initial_basis_state, layer_checkpoints);
        if (acc.empty()) {
            acc = std::move(pops);
        } else {
            for (size_t c = 0; c < acc.size(); ++c)
                for (size_t i = 0; i < acc[c].size(); ++i) acc[c][i] += pops[c][i];
        }
    }
    double inv = 1.0 / static_cast<double>(spec.twirl.n_instances);
    for (auto& pops : acc)
        for (double& v : pops) v *= inv;
    return acc;
}

std::vector<double> sample_shots(const std::vector<double>& exact_pops, long shots,
                                 RngStream& stream) {
    if (shots < 1) throw std::invalid_argument("need at least one shot");
    std::vector<double> cdf(exact_pops.size());
    double acc = 0.0;
    for (size_t i = 0; i < exact_pops.size(); ++i) {
        acc += std::max(0.0, exact_pops[i]);
        cdf[i] = acc;
    }
    if (acc <= 0.0) throw std::invalid_argument("populations carry no mass");

    std::vector<long> counts(exact_pops.size(), 0);
    for (long s = 0; s < shots; ++s) {
        double u = stream.next_uniform() * acc;
        size_t idx = static_cast<size_t>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= counts.size()) idx = counts.size() - 1;
        ++counts[idx];
    }
    std::vector<double> pops(exact_pops.size());
    for (size_t i = 0; i < pops.size(); ++i)
        pops[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
    return pops;
}

}  // namespace sqnf
