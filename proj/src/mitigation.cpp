#include "sqnf/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqnf {

namespace {

// numerical-zero tolerance for the raw useful mass seen by MP
constexpr double kZeroMass = 1e-15;

// MS declares all-clipped when the surviving mass is below the resolution of
// the populations themselves. Deeply saturated sweeps freeze at an fp fixed
// point whose clipped residue measures a few 1e-15; genuinely recoverable
// signal stays above 1e-11. 1e-13 separates the two regimes by 100x each way.
constexpr double kAllClippedMass = 1e-13;

void check_distribution(const std::vector<double>& pops) {
    double sum = 0.0;
    for (double p : pops) {
        if (!(p >= 0.0)) throw std::invalid_argument("populations must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("populations must sum to 1 within 1e-9");
}

}  // namespace

const char* mitigation_method_name(MitigationMethod m) {
    switch (m) {
        case MitigationMethod::M0: return "m0";
        case MitigationMethod::MP: return "mp";
        case MitigationMethod::MS: return "ms";
    }
    return "?";
}

const char* mitigation_status_name(MitigationStatus s) {
    switch (s) {
        case MitigationStatus::ok: return "ok";
        case MitigationStatus::failed_all_clipped: return "failed_all_clipped";
        case MitigationStatus::failed_zero_useful_mass: return "failed_zero_useful_mass";
    }
    return "?";
}

MitigationOutcome method_m0(const std::vector<double>& pops) {
    check_distribution(pops);
    return MitigationOutcome{MitigationMethod::M0, MitigationStatus::ok, pops, std::nullopt};
}

MitigationOutcome method_mp(const std::vector<double>& pops, const SubspaceIndex& idx) {
    check_distribution(pops);
    MitigationOutcome out;
    out.method = MitigationMethod::MP;
    out.distribution.assign(pops.size(), 0.0);

    double useful_mass = 0.0;
    for (long i : idx.useful_indices) useful_mass += pops[static_cast<size_t>(i)];
    if (useful_mass < kZeroMass) {
        out.status = MitigationStatus::failed_zero_useful_mass;
        return out;
    }
    for (long i : idx.useful_indices)
        out.distribution[static_cast<size_t>(i)] = pops[static_cast<size_t>(i)] / useful_mass;
    return out;
}

MitigationOutcome method_ms(const std::vector<double>& pops, const SubspaceIndex& idx) {
    check_distribution(pops);
    MitigationOutcome out;
    out.method = MitigationMethod::MS;
    out.distribution.assign(pops.size(), 0.0);

    double junk_mass = 0.0;
    for (long i : idx.junk_indices) junk_mass += pops[static_cast<size_t>(i)];
    double c = idx.junk_indices.empty() ? 0.0
                                        : junk_mass / static_cast<double>(idx.junk_indices.size());
    out.estimated_c = c;

    double kept = 0.0;
    for (long i : idx.useful_indices) {
        double v = std::max(0.0, pops[static_cast<size_t>(i)] - c);
        out.distribution[static_cast<size_t>(i)] = v;
        kept += v;
    }
    if (kept < kAllClippedMass) {
        std::fill(out.distribution.begin(), out.distribution.end(), 0.0);
        out.status = MitigationStatus::failed_all_clipped;
        return out;
    }
    for (long i : idx.useful_indices) out.distribution[static_cast<size_t>(i)] /= kept;
    return out;
}

double pn_from_rate(double p, long n) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("rate must lie in [0,1]");
    if (n < 0) throw std::invalid_argument("layer count must be nonnegative");
    return 1.0 - std::pow(1.0 - p, static_cast<double>(n));
}

DensityMatrix apply_global_depolarizing(const DensityMatrix& rho_ideal, double P) {
    if (!(P >= 0.0 && P <= 1.0)) throw std::invalid_argument("rate must lie in [0,1]");
    long d = rho_ideal.dim();
    ComplexMatrix m = (1.0 - P) * rho_ideal.mat;
    for (long i = 0; i < d; ++i) m(i, i) += P / static_cast<double>(d);
    return DensityMatrix{rho_ideal.n_qubits, std::move(m)};
}

ComplexMatrix recover_ideal_block(const DensityMatrix& rho_f, double P,
                                  const SubspaceIndex& idx) {
    if (!(P >= 0.0 && P < 1.0))
        throw std::invalid_argument("recovery needs P < 1; nothing survives total depolarization");
    long nu = static_cast<long>(idx.useful_indices.size());
    double c = P / static_cast<double>(rho_f.dim());
    ComplexMatrix block(nu, nu);
    for (long r = 0; r < nu; ++r)
        for (long col = 0; col < nu; ++col)
            block(r, col) = rho_f.mat(idx.useful_indices[static_cast<size_t>(r)],
                                      idx.useful_indices[static_cast<size_t>(col)]);
    for (long r = 0; r < nu; ++r) block(r, r) -= c;
    return block / (1.0 - P);
}

}  // namespace sqnf
