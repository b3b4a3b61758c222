#include "sqnf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sqnf {

namespace {

void check_pair(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("distribution length mismatch");
    double sp = 0.0, sq = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] >= 0.0) || !(q[i] >= 0.0))
            throw std::invalid_argument("distributions must be nonnegative");
        sp += p[i];
        sq += q[i];
    }
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw std::invalid_argument("distributions must sum to 1 within 1e-9");
}

}  // namespace

MetricValue bhattacharyya_fidelity(const std::vector<double>& p, const std::vector<double>& q) {
    check_pair(p, q);
    double f = 0.0;
    for (size_t i = 0; i < p.size(); ++i) f += std::sqrt(p[i] * q[i]);
    return MetricValue{f, MetricStatus::ok};
}

MetricValue infidelity(const std::vector<double>& p, const std::vector<double>& q) {
    MetricValue f = bhattacharyya_fidelity(p, q);
    return MetricValue{std::clamp(1.0 - f.value, 0.0, 1.0), MetricStatus::ok};
}

MetricValue kl_junk(const std::vector<double>& pops, const SubspaceIndex& idx) {
    if (pops.size() != static_cast<size_t>(1L << idx.n_qubits))
        throw std::invalid_argument("population vector length mismatch");

    double junk_mass = 0.0;
    for (long i : idx.junk_indices) junk_mass += pops[static_cast<size_t>(i)];
    if (junk_mass < 1e-15) return MetricValue{0.0, MetricStatus::undefined_zero_mass};

    std::vector<double> means;
    means.reserve(idx.groups.size());
    double total = 0.0;
    for (const auto& [label, states] : idx.groups) {
        double m = 0.0;
        for (long i : states) m += pops[static_cast<size_t>(i)];
        m /= static_cast<double>(states.size());
        means.push_back(m);
        total += m;
    }
    double even = 1.0 / static_cast<double>(means.size());
    double d = 0.0;
    for (double m : means) {
        double v = m / total;
        if (v <= 0.0) return MetricValue{0.0, MetricStatus::undefined_zero_mass};
        d += even * std::log(even / v);
    }
    return MetricValue{std::max(0.0, d), MetricStatus::ok};
}

MetricValue kl_useful(const std::vector<double>& ideal_pops, const SubspaceIndex& idx) {
    if (ideal_pops.size() != static_cast<size_t>(1L << idx.n_qubits))
        throw std::invalid_argument("population vector length mismatch");
    double junk_mass = 0.0;
    for (long i : idx.junk_indices) junk_mass += ideal_pops[static_cast<size_t>(i)];
    if (junk_mass > 1e-9)
        throw std::invalid_argument("ideal populations must be supported on the useful set");

    double useful_mass = 0.0;
    for (long i : idx.useful_indices) useful_mass += ideal_pops[static_cast<size_t>(i)];
    if (useful_mass < 1e-15) return MetricValue{0.0, MetricStatus::undefined_zero_mass};

    double even = 1.0 / static_cast<double>(idx.useful_indices.size());
    double d = 0.0;
    for (long i : idx.useful_indices) {
        double v = ideal_pops[static_cast<size_t>(i)] / useful_mass;
        if (v <= 0.0) return MetricValue{0.0, MetricStatus::undefined_zero_mass};
        d += even * std::log(even / v);
    }
    return MetricValue{std::max(0.0, d), MetricStatus::ok};
}

}  // namespace sqnf
