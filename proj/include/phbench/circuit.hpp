// Translation-invariant brickwork ansatz on a qubit ring, its statevector
// simulation, and energy / gradient evaluation against a sum of local terms.
//
// One depth unit is a "blue" layer of two-qubit blocks on bonds (2k, 2k+1)
// followed by a "red" layer on bonds (2k+1, 2k+2 mod N). Every block in a
// layer shares one angle theta and applies RX(theta) to both qubits, then CZ,
// then RZ(theta) to both qubits. Depth unit d uses parameter slots 2d (blue)
// and 2d+1 (red).

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "phbench/linalg.hpp"

namespace phbench {

/// Ansatz angles in radians, stored unwrapped.
using ParamVector = Eigen::VectorXd;

class ParentHamiltonian;

struct AnsatzSpec {
  int num_qubits = 0;
  int depth = 0;

  int num_params() const { return 2 * depth; }
  /// Throws std::invalid_argument unless N is even and >= 4 and depth >= 1.
  void validate() const;
  bool operator==(const AnsatzSpec&) const = default;
};

enum class GateKind { RX, RZ, CZ };

std::string to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

struct Gate {
  GateKind kind = GateKind::RX;
  std::vector<int> qubits;
  std::optional<int> param_slot;

  bool operator==(const Gate&) const = default;
};

struct GateList {
  int num_qubits = 0;
  std::vector<Gate> gates;

  /// One past the largest parameter slot referenced.
  int num_params() const;
  /// Checks the per-record invariants (slots on rotations only, qubits in range).
  void validate() const;
  bool operator==(const GateList&) const = default;
};

GateList build_ansatz(const AnsatzSpec& spec);

/// Applies one gate in place, with `angle` used for rotations.
void apply_gate(ComplexVector& state, int num_qubits, const Gate& gate, double angle);

/// U(theta)|0...0>.
ComplexVector simulate(const GateList& circuit, const ParamVector& theta);

nlohmann::json gates_to_json(const GateList& circuit);
GateList gates_from_json(const nlohmann::json& j);

/// Evaluates E(theta) = <psi(theta)|H|psi(theta)> for a fixed circuit and
/// Hamiltonian. Index tables and low-rank factors of the local terms are
/// prepared once at construction; evaluation never forms a 2^N x 2^N matrix.
/// Instances are immutable after construction and safe to share across threads.
class EnergyEvaluator {
 public:
  EnergyEvaluator(GateList circuit, const ParentHamiltonian& hamiltonian);

  const GateList& circuit() const { return circuit_; }
  int num_params() const { return num_params_; }

  double expectation(const ComplexVector& state) const;
  double energy(const ParamVector& theta) const;

  /// Shift rule applied to every gate occurrence carrying slot j, summed.
  RealVector gradient_parameter_shift(const ParamVector& theta) const;
  /// Central differences (E(theta + step e_j) - E(theta - step e_j)) / (2 step).
  RealVector gradient_finite_difference(const ParamVector& theta, double step) const;

 private:
  struct TermFactor {
    std::vector<std::uint32_t> table;
    Eigen::Index window_dim = 0;
    // kRange: E_i = |V^dag Psi|^2, V an isometry onto the projector's range.
    // kComplement: E_i = |Psi|^2 - |W^dag Psi|^2, W onto the orthogonal complement.
    // kDense: E_i = Re Tr(Psi^dag h Psi).
    enum class Mode { kRange, kComplement, kDense } mode = Mode::kDense;
    ComplexMatrix factor;
  };

  void check_theta(const ParamVector& theta) const;
  double energy_from(ComplexVector state, std::size_t first_gate,
                     const ParamVector& theta) const;

  GateList circuit_;
  int num_params_ = 0;
  std::vector<TermFactor> terms_;
};

double energy(const GateList& circuit, const ParamVector& theta,
              const ParentHamiltonian& hamiltonian);
RealVector gradient_parameter_shift(const GateList& circuit, const ParamVector& theta,
                                    const ParentHamiltonian& hamiltonian);
RealVector gradient_finite_difference(const GateList& circuit, const ParamVector& theta,
                                      const ParentHamiltonian& hamiltonian, double step);

}  // namespace phbench
