#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqnf/mitigation.hpp"
#include "sqnf/noise.hpp"

namespace sqnf {

// One sweep = a grid of (circuit depth, noise spec) cells, each aggregated
// over n_circuits independently seeded ladder circuits. Circuit seeds are
// derived from (master_seed, circuit index), so the same circuits are reused
// at every noise point and results pair across the grid.
struct SweepConfig {
    int n_qubits = 4;
    int n_excitations = 2;
    long initial_state = -1;  // -1 selects the default weight-n_e basis state
    std::vector<int> depth_grid;
    std::vector<NoiseSpec> noise_grid;
    int n_circuits = 21;
    std::uint64_t master_seed = 0;
    long shots = 0;  // 0 = exact populations, otherwise multinomial samples
    std::string grouping = "default";
    std::string preset_name;
    // Rate sweeps may pin one literal circuit seed instead of deriving them;
    // requires n_circuits == 1.
    std::optional<std::uint64_t> fixed_circuit_seed;

    bool operator==(const SweepConfig&) const = default;
};

void validate_sweep_config(const SweepConfig& cfg);

// Basis index actually used as the initial state (resolves the -1 default).
long resolve_initial_state(const SweepConfig& cfg);

struct MethodStats {
    double mean_infidelity = 0.0;  // NaN when no circuit succeeded
    double std_infidelity = 0.0;   // sample std over successes; 0 when n <= 1
    int n_failed = 0;
};

struct ExperimentRecord {
    std::string preset;
    int n_qubits = 0;
    int n_excitations = 0;
    int depth = 0;
    NoiseSpec noise;
    long shots = 0;
    int n_circuits = 0;
    std::uint64_t master_seed = 0;
    std::array<MethodStats, 3> methods;  // indexed by MitigationMethod order
    double mean_dkl_junk = 0.0;          // NaN when undefined for every circuit
    double std_dkl_junk = 0.0;
    int n_dkl_undefined = 0;
    std::vector<double> dkl_useful;      // per circuit; NaN where undefined
    std::string timestamp;               // ISO-8601 UTC, excluded from CSV
};

const MethodStats& stats_for(const ExperimentRecord& rec, MitigationMethod m);

// Depth sweep: one noise point, one ladder per seed built at the deepest grid
// value and evaluated at every prefix. Records ordered by depth.
std::vector<ExperimentRecord> run_depth_sweep(const SweepConfig& cfg, int n_workers = 1);

// Rate sweep: a single depth, many noise points, the same circuits paired
// across all of them. fixed_circuit_seed (argument wins over the config
// field) pins the sweep to one literal circuit.
std::vector<ExperimentRecord> run_rate_sweep(const SweepConfig& cfg,
                                             std::optional<std::uint64_t> fixed_circuit_seed = {},
                                             int n_workers = 1);

// Full 2-D grid. Records ordered by (depth, noise-grid position); cells where
// every circuit failed a method carry NaN means (rendered NA downstream).
std::vector<ExperimentRecord> run_heatmap(const SweepConfig& cfg, int n_workers = 1);

enum class SweepKind { depth_sweep, rate_sweep, heatmap };

struct Preset {
    std::string name;
    std::string description;
    SweepKind kind;
    SweepConfig config;
};

const std::vector<Preset>& list_presets();
const Preset* find_preset(const std::string& name);

// A preset run may emit several named record sets (the rate-sweep preset
// selects two circuits and sweeps each). note carries human-readable
// selection details.
struct PresetOutput {
    std::string name;
    std::vector<ExperimentRecord> records;
    std::string note;
};

std::vector<PresetOutput> run_preset(const std::string& name, int n_workers = 1);

// Scans candidate seeds derived from (search_seed, circuit index, k) and
// returns the one whose ideal useful-subspace divergence at the given depth
// lands nearest the target.
struct SeedSearchResult {
    std::uint64_t circuit_seed = 0;
    double dkl_useful = 0.0;
    long candidate_index = -1;
    bool within_tolerance = false;  // |dkl - target| <= 0.1
};

SeedSearchResult select_circuit_by_dkl_u(int n_qubits, int n_excitations, int depth,
                                         std::uint64_t search_seed, double target,
                                         long n_candidates, const std::string& grouping = "default");

// Depth-sweep diagnostics over records from a single noise point, ascending
// in depth and with both MP and MS means defined.
//
// First bracket (N_k, N_{k+1}) where mean MS infidelity moves from <= MP to
// > MP; nullopt when no such adjacent pair exists.
std::optional<std::pair<int, int>> find_ms_mp_crossing(const std::vector<ExperimentRecord>& recs);

// Largest grid depth where MS still does at least as well as MP; +infinity
// when that holds at the deepest point (no crossing inside the grid), 0 when
// it holds nowhere.
double ms_mp_crossing_depth(const std::vector<ExperimentRecord>& recs);

// Spearman rank correlation with average ranks on ties; NaN for n < 2.
double spearman_rank_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace sqnf
