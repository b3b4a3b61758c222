#include "sqnf/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sqnf {

long dim_for_qubits(int n_qubits) {
    if (n_qubits < 0 || n_qubits > 30) throw std::invalid_argument("qubit count out of range");
    return 1L << n_qubits;
}

ComplexMatrix identity_matrix(long dim) { return ComplexMatrix::Identity(dim, dim); }

DensityMatrix DensityMatrix::basis_state(int n_qubits, long index) {
    long d = dim_for_qubits(n_qubits);
    if (index < 0 || index >= d) throw std::out_of_range("basis index out of range");
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(index, index) = 1.0;
    return DensityMatrix{n_qubits, std::move(m)};
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
    long d = dim_for_qubits(n_qubits);
    ComplexMatrix m = ComplexMatrix::Identity(d, d) * (1.0 / static_cast<double>(d));
    return DensityMatrix{n_qubits, std::move(m)};
}

DensityMatrix DensityMatrix::from_pure(int n_qubits, const ComplexVector& amplitudes) {
    long d = dim_for_qubits(n_qubits);
    if (amplitudes.size() != d) throw std::invalid_argument("amplitude length mismatch");
    ComplexVector psi = amplitudes / amplitudes.norm();
    ComplexMatrix m = psi * psi.adjoint();
    return DensityMatrix{n_qubits, std::move(m)};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

namespace {

// Local row/col index for a global basis index: target bits in order, first
// target most significant.
long local_index(long global, const std::vector<int>& targets, int n_qubits) {
    long loc = 0;
    for (int t : targets) loc = (loc << 1) | ((global >> (n_qubits - 1 - t)) & 1);
    return loc;
}

long clear_targets(long global, const std::vector<int>& targets, int n_qubits) {
    for (int t : targets) global &= ~(1L << (n_qubits - 1 - t));
    return global;
}

}  // namespace

ComplexMatrix embed_operator(const ComplexMatrix& op, const std::vector<int>& targets,
                             int n_qubits) {
    long d = dim_for_qubits(n_qubits);
    long local_dim = 1L << targets.size();
    if (op.rows() != local_dim || op.cols() != local_dim)
        throw std::invalid_argument("operator dimension does not match target count");
    for (size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] < 0 || targets[i] >= n_qubits)
            throw std::out_of_range("target qubit index out of range");
        for (size_t j = i + 1; j < targets.size(); ++j)
            if (targets[i] == targets[j]) throw std::invalid_argument("duplicate target qubit");
    }

    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    for (long row = 0; row < d; ++row) {
        long rest = clear_targets(row, targets, n_qubits);
        long lr = local_index(row, targets, n_qubits);
        for (long lc = 0; lc < local_dim; ++lc) {
            cplx v = op(lr, lc);
            if (v == cplx{0.0, 0.0}) continue;
            // scatter local column bits back into the global index
            long col = rest;
            for (size_t k = 0; k < targets.size(); ++k) {
                long bit = (lc >> (targets.size() - 1 - k)) & 1;
                col |= bit << (n_qubits - 1 - targets[k]);
            }
            out(row, col) = v;
        }
    }
    return out;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u,
                            const std::vector<int>& targets) {
#ifndef NDEBUG
    if (!is_unitary(u, 1e-10)) throw std::invalid_argument("operator is not unitary");
#endif
    ComplexMatrix full = embed_operator(u, targets, rho.n_qubits);
    ComplexMatrix tmp = full * rho.mat;
    return DensityMatrix{rho.n_qubits, tmp * full.adjoint()};
}

DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<ComplexMatrix>& kraus,
                          const std::vector<int>& targets) {
    if (!kraus_complete(kraus, 1e-10)) throw std::invalid_argument("incomplete Kraus set");
    ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
    for (const ComplexMatrix& k : kraus) {
        ComplexMatrix full = embed_operator(k, targets, rho.n_qubits);
        ComplexMatrix tmp = full * rho.mat;
        out.noalias() += tmp * full.adjoint();
    }
    return DensityMatrix{rho.n_qubits, std::move(out)};
}

std::vector<double> diagonal(const DensityMatrix& rho) {
    std::vector<double> pops(static_cast<size_t>(rho.dim()));
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        double p = rho.mat(i, i).real();
        pops[static_cast<size_t>(i)] = std::abs(p) < 1e-14 ? 0.0 : p;
    }
    return pops;
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

double hermiticity_error(const ComplexMatrix& m) {
    return max_abs(ComplexMatrix(m - m.adjoint()));
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    ComplexMatrix prod = m.adjoint() * m;
    return max_abs(ComplexMatrix(prod - identity_matrix(m.rows()))) < tol;
}

bool kraus_complete(const std::vector<ComplexMatrix>& kraus, double tol) {
    if (kraus.empty()) return false;
    ComplexMatrix sum = ComplexMatrix::Zero(kraus[0].cols(), kraus[0].cols());
    for (const ComplexMatrix& k : kraus) sum.noalias() += k.adjoint() * k;
    return max_abs(ComplexMatrix(sum - identity_matrix(sum.rows()))) < tol;
}

double max_error_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("shape mismatch");
    // pick the phase from the largest entry of b
    Eigen::Index ri = 0, ci = 0;
    b.cwiseAbs().maxCoeff(&ri, &ci);
    cplx phase{1.0, 0.0};
    if (std::abs(b(ri, ci)) > 0 && std::abs(a(ri, ci)) > 0)
        phase = a(ri, ci) / b(ri, ci) / std::abs(a(ri, ci) / b(ri, ci));
    return max_abs(ComplexMatrix(a - phase * b));
}

}  // namespace sqnf
