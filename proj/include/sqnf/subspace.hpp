#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sqnf {

// Partition of the computational basis by excitation number: the useful set
// holds every state of weight n_excitations, the junk set the rest, and the
// groups cover the junk set for the grouped divergence.
struct SubspaceIndex {
    int n_qubits = 0;
    int n_excitations = 0;
    std::vector<long> useful_indices;  // sorted
    std::vector<long> junk_indices;    // sorted
    std::vector<std::pair<std::string, std::vector<long>>> groups;
};

int hamming_weight(long basis_index, int n_qubits);

// grouping policies:
//   "default"   one group per junk Hamming weight
//   "paper-4q"  the merged 4-qubit variant {w0,w4}, {w1}, {w3}; requires
//               n_qubits = 4, n_excitations = 2
//   "singleton" one group per junk state (plain KL against uniform)
SubspaceIndex build_subspace(int n_qubits, int n_excitations,
                             const std::string& grouping = "default");

struct SplitPopulations {
    std::vector<std::pair<long, double>> useful;
    std::vector<std::pair<long, double>> junk;
};

SplitPopulations split_populations(const std::vector<double>& pops, const SubspaceIndex& idx);

}  // namespace sqnf
