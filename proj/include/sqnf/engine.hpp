#pragma once

#include <optional>
#include <vector>

#include "sqnf/circuit.hpp"
#include "sqnf/linalg.hpp"
#include "sqnf/noise.hpp"
#include "sqnf/rng.hpp"

namespace sqnf {

struct SimResult {
    std::optional<DensityMatrix> final_rho;  // retained on request only
    std::vector<double> exact_pops;
    std::optional<std::vector<double>> sampled_pops;
    std::optional<long> shots;
    int twirl_instances_used = 0;
};

struct RunOptions {
    bool keep_final_rho = false;
};

// Executes the instruction list on the pure initial basis state. Embedded
// operators are cached per run: channels always, unitaries only when the same
// (operator, targets) pair recurs, since one-shot composites would bloat the
// cache without ever being reused.
SimResult run(const NoisyProgram& program, long initial_basis_state,
              const RunOptions& opts = {});

// One streaming pass capturing exact populations after each requested layer
// count (ascending; 0 means the initial state).
std::vector<std::vector<double>> run_with_checkpoints(const NoisyProgram& program,
                                                      long initial_basis_state,
                                                      const std::vector<int>& layer_checkpoints);

// Averages exact populations over independently drawn twirl instances of the
// gate-level program. Instance k draws from a stream derived from
// (spec.twirl.seed, twirl tag, k), so results are order independent.
SimResult run_twirled(const Circuit& circuit, const NoiseSpec& spec, long initial_basis_state);

std::vector<std::vector<double>> run_twirled_with_checkpoints(
    const Circuit& circuit, const NoiseSpec& spec, long initial_basis_state,
    const std::vector<int>& layer_checkpoints);

// Multinomial sampling via inverse CDF; returns counts/shots.
std::vector<double> sample_shots(const std::vector<double>& exact_pops, long shots,
                                 RngStream& stream);

}  // namespace sqnf
