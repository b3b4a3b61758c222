#pragma once

#include <optional>
#include <vector>

#include "sqnf/linalg.hpp"
#include "sqnf/subspace.hpp"

namespace sqnf {

enum class MitigationMethod { M0, MP, MS };
enum class MitigationStatus { ok, failed_all_clipped, failed_zero_useful_mass };

const char* mitigation_method_name(MitigationMethod m);
const char* mitigation_status_name(MitigationStatus s);

// Failures are statuses, not exceptions: sweeps must count them per cell.
struct MitigationOutcome {
    MitigationMethod method;
    MitigationStatus status = MitigationStatus::ok;
    std::vector<double> distribution;     // length d; zero outside the useful set for MP/MS
    std::optional<double> estimated_c;    // MS only
};

// M0: raw populations, untouched.
MitigationOutcome method_m0(const std::vector<double>& pops);

// MP: discard junk populations, renormalize the useful ones.
MitigationOutcome method_mp(const std::vector<double>& pops, const SubspaceIndex& idx);

// MS: estimate the uniform error floor c as the mean over ALL junk states,
// subtract it from each useful population, clip at zero, renormalize.
MitigationOutcome method_ms(const std::vector<double>& pops, const SubspaceIndex& idx);

// Equivalent global depolarizing probability after n layers at per-layer rate p.
double pn_from_rate(double p, long n);

// rho -> P * I/d + (1-P) * rho.
DensityMatrix apply_global_depolarizing(const DensityMatrix& rho_ideal, double P);

// Inverse of the global model restricted to the useful block: extracts the
// S_u x S_u block of rho_f and returns (block - (P/d) I) / (1-P).
ComplexMatrix recover_ideal_block(const DensityMatrix& rho_f, double P,
                                  const SubspaceIndex& idx);

}  // namespace sqnf
