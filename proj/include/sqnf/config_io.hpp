#pragma once

#include <string>
#include <vector>

#include "sqnf/harness.hpp"
#include "sqnf/subspace.hpp"

namespace sqnf {

// JSON sweep-config document. A "preset" key expands the named preset's
// config as the base; every other key overrides one field of it. Unknown
// keys fail closed, before any computation.
SweepConfig parse_config(const std::string& text);

// Emits every field explicitly; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SweepConfig& cfg);

struct CountsIngest {
    std::vector<double> populations;  // 2^n_qubits entries, sums to 1
    SubspaceIndex subspace;
    long total_count = 0;
};

// Plain-text counts: "n_qubits=K" then "n_excitations=K" header lines, then
// one "bitstring,count" record per line. Blank lines are allowed; every
// error names its 1-based line number.
CountsIngest ingest_counts(const std::string& text);

// One row per (record, method), schema:
//   preset,n_qubits,n_excitations,N,gamma_identity,gamma_a1,gamma_p1,
//   gamma_a2,gamma_p2,twirl,shots,method,mean_infidelity,std_infidelity,
//   mean_dkl_junk,std_dkl_junk,n_failed,n_circuits,master_seed
// Floats carry 17 significant digits, NaN renders as NA, rows sort by
// (N, noise rates, twirl, method), lines end with LF. The twirl column is
// n_instances when twirling is on, else 0.
std::string emit_csv(const std::vector<ExperimentRecord>& records);

}  // namespace sqnf
