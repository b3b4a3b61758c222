#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace sqnf {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Qubit 0 is the most significant bit of a
/// basis-state index throughout the project.
using ComplexMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using ComplexVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

/// d x d Hermitian, trace-1 state of an n_qubits register (d = 2^n_qubits).
struct DensityMatrix {
    int n_qubits = 0;
    ComplexMatrix mat;

    Eigen::Index dim() const { return mat.rows(); }

    static DensityMatrix basis_state(int n_qubits, long index);
    static DensityMatrix maximally_mixed(int n_qubits);
    static DensityMatrix from_pure(int n_qubits, const ComplexVector& amplitudes);
};

long dim_for_qubits(int n_qubits);

ComplexMatrix identity_matrix(long dim);

/// Kronecker product; result dims are the products of the operand dims.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Lift `op` (acting on `targets`, first target = most significant local bit)
/// to the full 2^n_qubits space, identity on the other qubits.
ComplexMatrix embed_operator(const ComplexMatrix& op, const std::vector<int>& targets,
                             int n_qubits);

/// rho -> U rho U^dagger with U = embed_operator(u, targets).
DensityMatrix apply_unitary(const DensityMatrix& rho, const ComplexMatrix& u,
                            const std::vector<int>& targets);

/// rho -> sum_k K_k rho K_k^dagger, each Kraus operator embedded on `targets`.
/// Requires sum_k K^dagger K = I on the local dimension (1e-10).
DensityMatrix apply_kraus(const DensityMatrix& rho, const std::vector<ComplexMatrix>& kraus,
                          const std::vector<int>& targets);

/// Real parts of the diagonal; magnitudes below 1e-14 clamp to zero.
std::vector<double> diagonal(const DensityMatrix& rho);

// --- inspection helpers (used by validation and tests) ---

double max_abs(const ComplexMatrix& m);
double hermiticity_error(const ComplexMatrix& m);
bool is_unitary(const ComplexMatrix& m, double tol);
bool kraus_complete(const std::vector<ComplexMatrix>& kraus, double tol);

/// Max elementwise deviation between a and e^{i phi} b over the best phi.
double max_error_up_to_phase(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace sqnf
