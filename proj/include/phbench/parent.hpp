// Parent Hamiltonians: sums of projectors onto the kernels of an ansatz
// state's reduced density matrices, so the state is an exact zero-energy
// ground state.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "phbench/mps.hpp"

namespace phbench {

/// A Hermitian operator on the cyclic window (anchor, span). Terms produced by
/// build_parent_hamiltonian are orthogonal projectors.
struct LocalTerm {
  int anchor = 0;
  int span = 1;
  ComplexMatrix matrix;
  int kernel_dim = 0;  // rank of the projector; 0 when unknown
};

struct Provenance {
  AnsatzSpec spec;
  ParamVector theta_ans;
  double kernel_tol = linalg::kDefaultKernelTol;
};

class ParentHamiltonian {
 public:
  ParentHamiltonian(int num_qubits, std::vector<LocalTerm> terms,
                    std::optional<Provenance> provenance = std::nullopt);

  int num_qubits() const { return num_qubits_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  const std::optional<Provenance>& provenance() const { return provenance_; }

 private:
  int num_qubits_;
  std::vector<LocalTerm> terms_;
  std::optional<Provenance> provenance_;
};

struct PauliTerm {
  std::string label;  // one of I, X, Y, Z per window qubit
  double coefficient = 0.0;
};

/// Smallest n such that every anchor's reduced density on n sites has a
/// non-empty numerical kernel. Throws std::runtime_error if none up to n_max.
int minimal_support(const PeriodicMPS& mps, int n_max,
                    double kernel_tol = linalg::kDefaultKernelTol);

/// Orthogonal projector onto Ker(rho). Throws std::runtime_error when the
/// kernel is empty.
ComplexMatrix kernel_projector(const ComplexMatrix& rho,
                               double kernel_tol = linalg::kDefaultKernelTol);

ParentHamiltonian build_parent_hamiltonian(
    const AnsatzSpec& spec, const ParamVector& theta_ans,
    double kernel_tol = linalg::kDefaultKernelTol);

inline constexpr int kMaxDenseQubits = 13;

/// The full 2^N x 2^N matrix. Throws for N > kMaxDenseQubits.
ComplexMatrix dense_matrix(const ParentHamiltonian& h);

/// All eigenvalues, ascending.
RealVector exact_spectrum(const ParentHamiltonian& h);

/// Lowest `count` eigenpairs of the dense matrix.
linalg::EigenDecomposition lowest_eigenpairs(const ParentHamiltonian& h, int count);

inline constexpr double kDefaultPauliDropBelow = 1e-8;

/// c_P = Tr[P h] / 2^n for every Pauli string P, skipping |c_P| < drop_below.
/// Labels are emitted in lexicographic I < X < Y < Z order.
std::vector<PauliTerm> pauli_decomposition(const ComplexMatrix& term,
                                           double drop_below = kDefaultPauliDropBelow);

ComplexMatrix pauli_string_matrix(const std::string& label);

/// Sum of c_P P.
ComplexMatrix pauli_reconstruct(const std::vector<PauliTerm>& terms, int span);

nlohmann::json hamiltonian_to_json(const ParentHamiltonian& h, bool with_pauli = false,
                                   double drop_below = kDefaultPauliDropBelow);
ParentHamiltonian hamiltonian_from_json(const nlohmann::json& j);

}  // namespace phbench
