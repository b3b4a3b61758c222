#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sqnf/linalg.hpp"
#include "sqnf/mitigation.hpp"
#include "sqnf/rng.hpp"
#include "sqnf/subspace.hpp"

using namespace sqnf;

namespace {

// Random pure state supported on the useful indices.
DensityMatrix random_useful_state(const SubspaceIndex& idx, RngStream& rng, uint64_t base) {
    long d = 1L << idx.n_qubits;
    ComplexVector amps = ComplexVector::Zero(d);
    uint64_t k = base;
    for (long i : idx.useful_indices) {
        double re = rng.uniform_at(k++) - 0.5;
        double im = rng.uniform_at(k++) - 0.5;
        amps(i) = cplx{re, im};
    }
    return DensityMatrix::from_pure(idx.n_qubits, amps);
}

}  // namespace

TEST_CASE("raw method returns its input") {
    std::vector<double> pops{0.25, 0.25, 0.25, 0.25};
    MitigationOutcome out = method_m0(pops);
    CHECK(out.status == MitigationStatus::ok);
    CHECK(out.distribution == pops);
    CHECK_FALSE(out.estimated_c.has_value());
}

TEST_CASE("methods validate their input") {
    CHECK_THROWS(method_m0({0.5, 0.6}));
    CHECK_THROWS(method_m0({-0.1, 1.1}));
}

TEST_CASE("discard and renormalize") {
    SubspaceIndex idx = build_subspace(2, 1);
    MitigationOutcome out = method_mp({0.2, 0.3, 0.3, 0.2}, idx);
    CHECK(out.status == MitigationStatus::ok);
    CHECK(out.distribution[0] == 0.0);
    CHECK(out.distribution[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.distribution[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.distribution[3] == 0.0);

    MitigationOutcome same = method_mp({0.0, 0.6, 0.4, 0.0}, idx);
    CHECK(same.distribution[1] == doctest::Approx(0.6).epsilon(1e-12));

    MitigationOutcome fail = method_mp({0.5, 0.0, 0.0, 0.5}, idx);
    CHECK(fail.status == MitigationStatus::failed_zero_useful_mass);
}

TEST_CASE("filter subtracts the junk mean floor") {
    SubspaceIndex idx = build_subspace(2, 1);
    MitigationOutcome out = method_ms({0.1, 0.5, 0.3, 0.1}, idx);
    CHECK(out.status == MitigationStatus::ok);
    REQUIRE(out.estimated_c.has_value());
    CHECK(*out.estimated_c == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(out.distribution[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(out.distribution[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(out.distribution[0] == 0.0);
    CHECK(out.distribution[3] == 0.0);
}

TEST_CASE("filter degenerates to discard when junk is empty") {
    SubspaceIndex idx = build_subspace(2, 1);
    std::vector<double> pops{0.0, 0.7, 0.3, 0.0};
    MitigationOutcome ms = method_ms(pops, idx);
    MitigationOutcome mp = method_mp(pops, idx);
    CHECK(*ms.estimated_c == 0.0);
    for (size_t i = 0; i < 4; ++i)
        CHECK(ms.distribution[i] == doctest::Approx(mp.distribution[i]).epsilon(1e-14));
}

TEST_CASE("filter reports total clipping") {
    SubspaceIndex idx = build_subspace(2, 1);
    MitigationOutcome out = method_ms({0.23, 0.05, 0.03, 0.69}, idx);
    CHECK(out.status == MitigationStatus::failed_all_clipped);
    REQUIRE(out.estimated_c.has_value());
    CHECK(*out.estimated_c == doctest::Approx(0.46).epsilon(1e-12));
    for (double v : out.distribution) CHECK(v == 0.0);
}

TEST_CASE("filter is idempotent on ok outputs") {
    SubspaceIndex idx = build_subspace(4, 2);
    std::vector<double> pops(16, 0.0);
    // useful states get uneven mass, junk a floor
    double junk_each = 0.3 / 10.0;
    for (long i : idx.junk_indices) pops[static_cast<size_t>(i)] = junk_each;
    double lead = 0.7 / 21.0;
    int k = 1;
    for (long i : idx.useful_indices) pops[static_cast<size_t>(i)] = lead * k++;
    MitigationOutcome once = method_ms(pops, idx);
    REQUIRE(once.status == MitigationStatus::ok);
    MitigationOutcome twice = method_ms(once.distribution, idx);
    REQUIRE(twice.status == MitigationStatus::ok);
    for (size_t i = 0; i < 16; ++i)
        CHECK(twice.distribution[i] == doctest::Approx(once.distribution[i]).epsilon(1e-12));
}

TEST_CASE("filter support is contained in discard support") {
    SubspaceIndex idx = build_subspace(4, 2);
    RngStream rng(2025);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pops(16);
        double sum = 0.0;
        for (size_t i = 0; i < 16; ++i) {
            pops[i] = rng.next_uniform();
            sum += pops[i];
        }
        for (double& p : pops) p /= sum;
        MitigationOutcome ms = method_ms(pops, idx);
        MitigationOutcome mp = method_mp(pops, idx);
        if (ms.status != MitigationStatus::ok) continue;
        for (size_t i = 0; i < 16; ++i)
            if (ms.distribution[i] > 0.0) CHECK(mp.distribution[i] > 0.0);
    }
}

TEST_CASE("filter depends on junk only through its mean") {
    SubspaceIndex idx = build_subspace(4, 2);
    std::vector<double> pops(16, 0.0);
    std::vector<double> junk_vals{0.05, 0.01, 0.0,  0.02, 0.0, 0.03, 0.0, 0.01, 0.0, 0.08};
    for (size_t j = 0; j < idx.junk_indices.size(); ++j)
        pops[static_cast<size_t>(idx.junk_indices[j])] = junk_vals[j];
    double remaining = 1.0 - std::accumulate(junk_vals.begin(), junk_vals.end(), 0.0);
    for (long i : idx.useful_indices) pops[static_cast<size_t>(i)] = remaining / 6.0;

    MitigationOutcome a = method_ms(pops, idx);
    std::reverse(junk_vals.begin(), junk_vals.end());
    for (size_t j = 0; j < idx.junk_indices.size(); ++j)
        pops[static_cast<size_t>(idx.junk_indices[j])] = junk_vals[j];
    MitigationOutcome b = method_ms(pops, idx);
    REQUIRE(a.status == MitigationStatus::ok);
    for (size_t i = 0; i < 16; ++i)
        CHECK(a.distribution[i] == doctest::Approx(b.distribution[i]).epsilon(1e-14));
}

TEST_CASE("ok outcomes are proper distributions") {
    SubspaceIndex idx = build_subspace(4, 2);
    RngStream rng(777);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> pops(16);
        double sum = 0.0;
        for (size_t i = 0; i < 16; ++i) {
            pops[i] = rng.next_uniform();
            sum += pops[i];
        }
        for (double& p : pops) p /= sum;
        for (const MitigationOutcome& out :
             {method_m0(pops), method_mp(pops, idx), method_ms(pops, idx)}) {
            if (out.status != MitigationStatus::ok) continue;
            double s = std::accumulate(out.distribution.begin(), out.distribution.end(), 0.0);
            CHECK(std::abs(s - 1.0) < 1e-12);
            for (double v : out.distribution) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("layer accumulated rate") {
    CHECK(pn_from_rate(0.37, 0) == 0.0);
    CHECK(pn_from_rate(1.0, 3) == 1.0);
    CHECK(pn_from_rate(0.005, 100) == doctest::Approx(0.39423).epsilon(1e-4));
    CHECK(pn_from_rate(0.005, 1) == doctest::Approx(0.005).epsilon(1e-12));
    CHECK_THROWS(pn_from_rate(-0.1, 5));
    CHECK_THROWS(pn_from_rate(1.5, 5));
}

TEST_CASE("global depolarizing blend") {
    DensityMatrix rho = DensityMatrix::basis_state(2, 3);
    DensityMatrix same = apply_global_depolarizing(rho, 0.0);
    CHECK(max_abs(ComplexMatrix(same.mat - rho.mat)) == 0.0);
    DensityMatrix mixed = apply_global_depolarizing(rho, 1.0);
    CHECK(max_abs(ComplexMatrix(mixed.mat - DensityMatrix::maximally_mixed(2).mat)) < 1e-15);
    DensityMatrix half = apply_global_depolarizing(rho, 0.5);
    CHECK(half.mat(3, 3).real() == doctest::Approx(0.5 / 4.0 + 0.5).epsilon(1e-12));
    CHECK(half.mat(0, 0).real() == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("block recovery inverts the global model") {
    SubspaceIndex idx = build_subspace(2, 1);
    RngStream rng(31415);
    for (int trial = 0; trial < 10; ++trial) {
        DensityMatrix rho = random_useful_state(idx, rng, 1000ULL * (trial + 1));
        for (double P : {0.0, 0.3, 0.9}) {
            DensityMatrix noisy = apply_global_depolarizing(rho, P);
            ComplexMatrix rec = recover_ideal_block(noisy, P, idx);
            for (size_t r = 0; r < 2; ++r)
                for (size_t c = 0; c < 2; ++c) {
                    cplx want = rho.mat(idx.useful_indices[r], idx.useful_indices[c]);
                    CHECK(std::abs(rec(static_cast<long>(r), static_cast<long>(c)) - want) <
                          1e-12);
                }
        }
    }
    CHECK_THROWS(recover_ideal_block(DensityMatrix::maximally_mixed(2), 1.0, idx));
}

TEST_CASE("pure state recovery at half depolarization") {
    SubspaceIndex idx = build_subspace(2, 1);
    DensityMatrix rho = DensityMatrix::basis_state(2, 1);
    DensityMatrix noisy = apply_global_depolarizing(rho, 0.5);
    ComplexMatrix rec = recover_ideal_block(noisy, 0.5, idx);
    CHECK(rec(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rec(1, 1)) < 1e-12);
    CHECK(std::abs(rec(0, 1)) < 1e-12);
}

TEST_CASE("filter inverts global depolarizing populations exactly") {
    RngStream rng(11);
    int cases = 0;
    for (int nq : {2, 4}) {
        int ne = nq / 2;
        SubspaceIndex idx = build_subspace(nq, ne);
        long d = 1L << nq;
        for (int trial = 0; trial < 17; ++trial) {
            DensityMatrix rho = random_useful_state(idx, rng, 37ULL * (cases + 1));
            std::vector<double> ideal = diagonal(rho);
            for (double P : {0.1, 0.5, 0.9}) {
                DensityMatrix noisy = apply_global_depolarizing(rho, P);
                MitigationOutcome out = method_ms(diagonal(noisy), idx);
                REQUIRE(out.status == MitigationStatus::ok);
                REQUIRE(out.estimated_c.has_value());
                CHECK(std::abs(*out.estimated_c - P / static_cast<double>(d)) < 1e-12);
                for (size_t i = 0; i < ideal.size(); ++i)
                    CHECK(std::abs(out.distribution[i] - ideal[i]) < 1e-12);
                ++cases;
            }
        }
    }
    CHECK(cases >= 100);
}
