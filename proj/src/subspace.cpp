#include "sqnf/subspace.hpp"

#include <map>
#include <stdexcept>

namespace sqnf {

int hamming_weight(long basis_index, int n_qubits) {
    if (basis_index < 0 || basis_index >= (1L << n_qubits))
        throw std::out_of_range("basis index out of range");
    return __builtin_popcountll(static_cast<unsigned long long>(basis_index));
}

SubspaceIndex build_subspace(int n_qubits, int n_excitations, const std::string& grouping) {
    if (n_qubits < 1 || n_qubits > 30) throw std::invalid_argument("qubit count out of range");
    if (n_excitations < 0 || n_excitations > n_qubits)
        throw std::invalid_argument("excitation count out of range");

    SubspaceIndex idx;
    idx.n_qubits = n_qubits;
    idx.n_excitations = n_excitations;

    long d = 1L << n_qubits;
    std::map<int, std::vector<long>> by_weight;
    for (long i = 0; i < d; ++i) {
        int w = hamming_weight(i, n_qubits);
        if (w == n_excitations) {
            idx.useful_indices.push_back(i);
        } else {
            idx.junk_indices.push_back(i);
            by_weight[w].push_back(i);
        }
    }

    if (grouping == "default") {
        for (const auto& [w, states] : by_weight)
            idx.groups.emplace_back("w" + std::to_string(w), states);
    } else if (grouping == "paper-4q") {
        if (n_qubits != 4 || n_excitations != 2)
            throw std::invalid_argument(
                "grouping 'paper-4q' applies only to n_qubits=4, n_excitations=2");
        std::vector<long> extremes = by_weight[0];
        extremes.insert(extremes.end(), by_weight[4].begin(), by_weight[4].end());
        idx.groups.emplace_back("w0w4", std::move(extremes));
        idx.groups.emplace_back("w1", by_weight[1]);
        idx.groups.emplace_back("w3", by_weight[3]);
    } else if (grouping == "singleton") {
        for (long i : idx.junk_indices)
            idx.groups.emplace_back("s" + std::to_string(i), std::vector<long>{i});
    } else {
        throw std::invalid_argument("unknown grouping policy: " + grouping);
    }
    return idx;
}

SplitPopulations split_populations(const std::vector<double>& pops, const SubspaceIndex& idx) {
    if (pops.size() != static_cast<size_t>(1L << idx.n_qubits))
        throw std::invalid_argument("population vector length mismatch");
    SplitPopulations out;
    out.useful.reserve(idx.useful_indices.size());
    out.junk.reserve(idx.junk_indices.size());
    for (long i : idx.useful_indices) out.useful.emplace_back(i, pops[static_cast<size_t>(i)]);
    for (long i : idx.junk_indices) out.junk.emplace_back(i, pops[static_cast<size_t>(i)]);
    return out;
}

}  // namespace sqnf
