// Dense complex linear algebra used throughout the benchmark generator.
//
// Qubit ordering convention: in a 2^N statevector, qubit q is stored at bit
// position (N - 1 - q) of the basis index, so qubit 0 is the most significant
// bit and kron(op_0, op_1, ..., op_{N-1}) acts qubit-wise. Every operator on a
// window of n qubits uses the same convention restricted to the window: the
// first window qubit is the most significant bit of the local index.

#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace phbench {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace linalg {

/// Relative threshold below which an eigenvalue of a PSD matrix is treated as
/// zero by nullspace_hermitian.
inline constexpr double kDefaultKernelTol = 1e-12;
/// Absolute threshold floor applied when the largest eigenvalue is below one.
inline constexpr double kKernelAbsFloor = 1e-12;

struct EigenDecomposition {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // column k pairs with values[k]
};

/// Largest entrywise deviation |m_ij - conj(m_ji)|.
double hermiticity_defect(const ComplexMatrix& m);

/// True when hermiticity_defect(m) <= tol * max(1, max|m_ij|).
bool is_hermitian(const ComplexMatrix& m, double tol = 1e-12);

/// Full eigendecomposition of a Hermitian matrix (LAPACK zheevd).
/// Throws std::invalid_argument on a non-square or non-Hermitian input.
EigenDecomposition eigh(const ComplexMatrix& m);

/// Eigenvalues only, ascending.
RealVector eigvalsh(const ComplexMatrix& m);

/// The `count` lowest eigenpairs (LAPACK zheevr with an index range).
EigenDecomposition eigh_lowest(const ComplexMatrix& m, int count);

/// Orthonormal basis (as matrix columns) of the numerical kernel of a Hermitian
/// PSD matrix. An eigenvalue counts as zero when it does not exceed
/// tol * lambda_max, raised to kKernelAbsFloor when lambda_max < 1.
/// Throws std::invalid_argument when the input has an eigenvalue below
/// minus that threshold.
ComplexMatrix nullspace_hermitian(const ComplexMatrix& m,
                                  double tol = kDefaultKernelTol);

/// The zero threshold nullspace_hermitian uses for a given largest eigenvalue.
double kernel_threshold(double lambda_max, double tol);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Number of qubits n with 2^n == dim; throws if dim is not a power of two.
int qubit_count(Eigen::Index dim);

/// A run of `length` consecutive qubits on an N-qubit ring, starting at
/// `start` and wrapping past N - 1 back to 0.
struct CyclicWindow {
  int start = 0;
  int length = 1;

  /// Builds a window from an explicit list of qubits. The list must read
  /// start, start+1, ... modulo N; anything else throws std::invalid_argument.
  static CyclicWindow from_qubits(std::span<const int> qubits, int num_qubits);

  int qubit(int j, int num_qubits) const { return (start + j) % num_qubits; }
  void validate(int num_qubits) const;
};

/// Gather table for a window: entry (w + r * 2^n) is the full basis index
/// whose window bits read w and whose remaining bits read r (remaining qubits
/// are taken in ring order after the window).
std::vector<std::uint32_t> window_index_table(int num_qubits, CyclicWindow window);

/// The state reshaped to a 2^n x 2^(N-n) matrix, rows indexed by the window.
ComplexMatrix window_matrix(const ComplexVector& state, int num_qubits,
                            CyclicWindow window);

/// Reduced density matrix of `state` on a cyclic window.
ComplexMatrix partial_trace(const ComplexVector& state, int num_qubits,
                            CyclicWindow window);

/// Embeds an operator acting on a window into the full 2^N space.
ComplexMatrix embed(const ComplexMatrix& op, int num_qubits, CyclicWindow window);

}  // namespace linalg
}  // namespace phbench
