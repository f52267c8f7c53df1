// Periodic matrix product states built from the brickwork ansatz.
//
// A site tensor is the pair {A_0, A_1} of D x D matrices, rows indexed by the
// left bond and columns by the right bond. The represented state has
// amplitude Tr[A^[0]_{i_0} A^[1]_{i_1} ... A^[N-1]_{i_{N-1}}] on |i_0 ... i_{N-1}>.

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "json.hpp"

#include "phbench/circuit.hpp"

namespace phbench {

using SiteTensor = std::array<ComplexMatrix, 2>;

class PeriodicMPS {
 public:
  /// `families` holds the distinct site tensors; site k uses
  /// families[site_family[k]]. All matrices must be D x D for one D.
  PeriodicMPS(std::vector<SiteTensor> families, std::vector<int> site_family);

  /// Every site carries the same tensor.
  static PeriodicMPS uniform(SiteTensor tensor, int num_sites);

  int num_sites() const { return static_cast<int>(site_family_.size()); }
  int bond_dim() const { return bond_dim_; }
  const SiteTensor& site(int k) const { return families_[site_family_[k % num_sites()]]; }
  const std::vector<SiteTensor>& families() const { return families_; }
  const std::vector<int>& site_family() const { return site_family_; }

 private:
  std::vector<SiteTensor> families_;
  std::vector<int> site_family_;
  int bond_dim_ = 0;
};

/// Per-site tensors of U(theta)|0...0> with D = 2^depth. Each CZ is split into
/// a Z^b factor on its left qubit and a |b><b| projector on its right qubit,
/// b being the shared bond bit; rotations act on the physical leg.
PeriodicMPS ansatz_to_mps(const AnsatzSpec& spec, const ParamVector& theta);

/// E = sum_i A_i (x) conj(A_i), indexed [(a, a'), (b, b')].
ComplexMatrix transfer_operator(const SiteTensor& tensor);

/// <psi|psi> of the represented state.
double mps_norm_squared(const PeriodicMPS& mps);

inline constexpr int kMaxStatevectorSites = 16;

/// Dense amplitudes, normalized. Throws for N > kMaxStatevectorSites.
ComplexVector mps_to_statevector(const PeriodicMPS& mps);

/// Reduced density matrix on sites anchor, anchor+1, ..., anchor+n-1 (mod N),
/// contracted through the transfer operators of the complementary sites.
ComplexMatrix reduced_density(const PeriodicMPS& mps, int anchor, int n);

/// Numerical rank of the map X -> sum Tr[A_{i_1} ... A_{i_L} X] |i_1 ... i_L>
/// built from sites 0, 1, ..., L-1 (singular values above 1e-8 sigma_max).
int gamma_map_rank(const PeriodicMPS& mps, int L);

inline constexpr int kMaxInjectivityLength = 16;

/// Smallest L <= L_max with gamma_map_rank == D^2.
std::optional<int> injectivity_length(const PeriodicMPS& mps, int L_max);

nlohmann::json mps_to_json(const PeriodicMPS& mps);

}  // namespace phbench
