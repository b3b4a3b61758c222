#pragma once

#include <vector>

#include "sqnf/subspace.hpp"

namespace sqnf {

enum class MetricStatus { ok, undefined_zero_mass };

struct MetricValue {
    double value = 0.0;
    MetricStatus status = MetricStatus::ok;
};

// F = sum_i sqrt(p_i q_i).
MetricValue bhattacharyya_fidelity(const std::vector<double>& p, const std::vector<double>& q);

// 1 - F, clamped to [0,1].
MetricValue infidelity(const std::vector<double>& p, const std::vector<double>& q);

// Grouped junk divergence: average the populations within each group,
// normalize the group values, compare against the uniform reference with the
// natural log. Undefined when junk carries no mass or a group value is zero.
MetricValue kl_junk(const std::vector<double>& pops, const SubspaceIndex& idx);

// Useful-subspace divergence of the ideal distribution from uniform.
// Undefined when any restricted ideal entry is zero.
MetricValue kl_useful(const std::vector<double>& ideal_pops, const SubspaceIndex& idx);

}  // namespace sqnf
