#include "phbench/circuit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "phbench/parent.hpp"

namespace phbench {

void AnsatzSpec::validate() const {
  if (num_qubits < 4 || num_qubits % 2 != 0) {
    throw std::invalid_argument(
        fmt::format("ansatz needs an even qubit count >= 4, got {}", num_qubits));
  }
  if (depth < 1) {
    throw std::invalid_argument(fmt::format("ansatz depth must be >= 1, got {}", depth));
  }
}

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::CZ: return "CZ";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& name) {
  if (name == "RX") return GateKind::RX;
  if (name == "RZ") return GateKind::RZ;
  if (name == "CZ") return GateKind::CZ;
  throw std::invalid_argument(fmt::format("unknown gate kind '{}'", name));
}

int GateList::num_params() const {
  int count = 0;
  for (const Gate& g : gates)
    if (g.param_slot) count = std::max(count, *g.param_slot + 1);
  return count;
}

void GateList::validate() const {
  if (num_qubits < 1) throw std::invalid_argument("gate list needs at least one qubit");
  for (std::size_t k = 0; k < gates.size(); ++k) {
    const Gate& g = gates[k];
    const std::size_t arity = g.kind == GateKind::CZ ? 2 : 1;
    if (g.qubits.size() != arity) {
      throw std::invalid_argument(
          fmt::format("gate {} ({}) acts on {} qubits, expected {}", k, to_string(g.kind),
                      g.qubits.size(), arity));
    }
    for (int q : g.qubits) {
      if (q < 0 || q >= num_qubits)
        throw std::invalid_argument(fmt::format("gate {}: qubit {} out of range", k, q));
    }
    if (arity == 2 && g.qubits[0] == g.qubits[1])
      throw std::invalid_argument(fmt::format("gate {}: repeated qubit", k));
    if (g.kind == GateKind::CZ && g.param_slot)
      throw std::invalid_argument(fmt::format("gate {}: CZ carries a parameter slot", k));
    if (g.kind != GateKind::CZ && (!g.param_slot || *g.param_slot < 0))
      throw std::invalid_argument(fmt::format("gate {}: rotation without a slot", k));
  }
}

GateList build_ansatz(const AnsatzSpec& spec) {
  spec.validate();
  const int n = spec.num_qubits;
  GateList out{n, {}};
  out.gates.reserve(static_cast<std::size_t>(5 * n * spec.depth));
  for (int d = 0; d < spec.depth; ++d) {
    for (int layer = 0; layer < 2; ++layer) {
      const int slot = 2 * d + layer;
      for (int k = 0; k < n / 2; ++k) {
        const int a = (2 * k + layer) % n;
        const int b = (2 * k + layer + 1) % n;
        out.gates.push_back({GateKind::RX, {a}, slot});
        out.gates.push_back({GateKind::RX, {b}, slot});
        out.gates.push_back({GateKind::CZ, {a, b}, std::nullopt});
        out.gates.push_back({GateKind::RZ, {a}, slot});
        out.gates.push_back({GateKind::RZ, {b}, slot});
      }
    }
  }
  return out;
}

void apply_gate(ComplexVector& state, int num_qubits, const Gate& gate, double angle) {
  const Eigen::Index dim = state.size();
  Complex* amp = state.data();
  switch (gate.kind) {
    case GateKind::RX: {
      const Eigen::Index mask = Eigen::Index{1} << (num_qubits - 1 - gate.qubits[0]);
      const double c = std::cos(0.5 * angle);
      const Complex ms{0.0, -std::sin(0.5 * angle)};
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & mask) continue;
        const Complex a0 = amp[i];
        const Complex a1 = amp[i | mask];
        amp[i] = c * a0 + ms * a1;
        amp[i | mask] = ms * a0 + c * a1;
      }
      break;
    }
    case GateKind::RZ: {
      const Eigen::Index mask = Eigen::Index{1} << (num_qubits - 1 - gate.qubits[0]);
      const Complex p0 = std::polar(1.0, -0.5 * angle);
      const Complex p1 = std::polar(1.0, 0.5 * angle);
      for (Eigen::Index i = 0; i < dim; ++i) amp[i] *= (i & mask) ? p1 : p0;
      break;
    }
    case GateKind::CZ: {
      const Eigen::Index mask = (Eigen::Index{1} << (num_qubits - 1 - gate.qubits[0])) |
                                (Eigen::Index{1} << (num_qubits - 1 - gate.qubits[1]));
      for (Eigen::Index i = 0; i < dim; ++i)
        if ((i & mask) == mask) amp[i] = -amp[i];
      break;
    }
  }
}

namespace {

void check_slots(const GateList& circuit, const ParamVector& theta) {
  for (const Gate& g : circuit.gates) {
    if (g.param_slot && *g.param_slot >= theta.size()) {
      throw std::invalid_argument(fmt::format(
          "parameter slot {} out of range for a vector of length {}", *g.param_slot,
          theta.size()));
    }
  }
}

double angle_of(const Gate& g, const ParamVector& theta) {
  return g.param_slot ? theta(*g.param_slot) : 0.0;
}

}  // namespace

ComplexVector simulate(const GateList& circuit, const ParamVector& theta) {
  circuit.validate();
  check_slots(circuit, theta);
  ComplexVector state = ComplexVector::Zero(Eigen::Index{1} << circuit.num_qubits);
  state(0) = 1.0;
  for (const Gate& g : circuit.gates) apply_gate(state, circuit.num_qubits, g, angle_of(g, theta));
  return state;
}

nlohmann::json gates_to_json(const GateList& circuit) {
  nlohmann::json records = nlohmann::json::array();
  for (const Gate& g : circuit.gates) {
    records.push_back({{"kind", to_string(g.kind)},
                       {"qubits", g.qubits},
                       {"param_slot", g.param_slot ? nlohmann::json(*g.param_slot)
                                                   : nlohmann::json(nullptr)}});
  }
  return {{"num_qubits", circuit.num_qubits}, {"gates", records}};
}

GateList gates_from_json(const nlohmann::json& j) {
  GateList out;
  out.num_qubits = j.at("num_qubits").get<int>();
  for (const auto& rec : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_string(rec.at("kind").get<std::string>());
    g.qubits = rec.at("qubits").get<std::vector<int>>();
    if (rec.contains("param_slot") && !rec.at("param_slot").is_null())
      g.param_slot = rec.at("param_slot").get<int>();
    out.gates.push_back(std::move(g));
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------

EnergyEvaluator::EnergyEvaluator(GateList circuit, const ParentHamiltonian& hamiltonian)
    : circuit_(std::move(circuit)), num_params_(circuit_.num_params()) {
  circuit_.validate();
  if (hamiltonian.num_qubits() != circuit_.num_qubits) {
    throw std::invalid_argument(fmt::format(
        "Hamiltonian acts on {} qubits but the circuit has {}", hamiltonian.num_qubits(),
        circuit_.num_qubits));
  }
  for (const LocalTerm& term : hamiltonian.terms()) {
    TermFactor f;
    linalg::CyclicWindow window{term.anchor, term.span};
    f.table = linalg::window_index_table(circuit_.num_qubits, window);
    f.window_dim = Eigen::Index{1} << term.span;
    const ComplexMatrix& h = term.matrix;
    const double scale = std::max(1.0, h.norm());
    if ((h * h - h).norm() <= 1e-9 * scale && linalg::is_hermitian(h)) {
      const linalg::EigenDecomposition eig = linalg::eigh(h);
      Eigen::Index zeros = 0;
      while (zeros < eig.values.size() && eig.values(zeros) < 0.5) ++zeros;
      const Eigen::Index rank = eig.values.size() - zeros;
      if (rank <= zeros) {
        f.mode = TermFactor::Mode::kRange;
        f.factor = eig.vectors.rightCols(rank);
      } else {
        f.mode = TermFactor::Mode::kComplement;
        f.factor = eig.vectors.leftCols(zeros);
      }
    } else {
      f.mode = TermFactor::Mode::kDense;
      f.factor = h;
    }
    terms_.push_back(std::move(f));
  }
}

double EnergyEvaluator::expectation(const ComplexVector& state) const {
  if (state.size() != (Eigen::Index{1} << circuit_.num_qubits))
    throw std::invalid_argument("expectation: state dimension mismatch");
  double total = 0.0;
  ComplexMatrix psi;
  for (const TermFactor& f : terms_) {
    psi.resize(f.window_dim, state.size() / f.window_dim);
    Complex* out = psi.data();
    for (std::size_t k = 0; k < f.table.size(); ++k) out[k] = state(f.table[k]);
    switch (f.mode) {
      case TermFactor::Mode::kRange:
        total += (f.factor.adjoint() * psi).squaredNorm();
        break;
      case TermFactor::Mode::kComplement:
        total += psi.squaredNorm() - (f.factor.adjoint() * psi).squaredNorm();
        break;
      case TermFactor::Mode::kDense:
        total += (psi.conjugate().cwiseProduct(f.factor * psi)).sum().real();
        break;
    }
  }
  return total;
}

void EnergyEvaluator::check_theta(const ParamVector& theta) const {
  if (theta.size() != num_params_) {
    throw std::invalid_argument(fmt::format(
        "parameter vector has length {}, circuit needs {}", theta.size(), num_params_));
  }
}

double EnergyEvaluator::energy_from(ComplexVector state, std::size_t first_gate,
                                    const ParamVector& theta) const {
  for (std::size_t k = first_gate; k < circuit_.gates.size(); ++k) {
    const Gate& g = circuit_.gates[k];
    apply_gate(state, circuit_.num_qubits, g, angle_of(g, theta));
  }
  return expectation(state);
}

double EnergyEvaluator::energy(const ParamVector& theta) const {
  check_theta(theta);
  ComplexVector state = ComplexVector::Zero(Eigen::Index{1} << circuit_.num_qubits);
  state(0) = 1.0;
  return energy_from(std::move(state), 0, theta);
}

RealVector EnergyEvaluator::gradient_parameter_shift(const ParamVector& theta) const {
  check_theta(theta);
  constexpr double kShift = std::numbers::pi / 2;
  RealVector grad = RealVector::Zero(theta.size());
  ComplexVector prefix = ComplexVector::Zero(Eigen::Index{1} << circuit_.num_qubits);
  prefix(0) = 1.0;
  const int n = circuit_.num_qubits;
  for (std::size_t k = 0; k < circuit_.gates.size(); ++k) {
    const Gate& g = circuit_.gates[k];
    const double angle = angle_of(g, theta);
    if (g.param_slot) {
      ComplexVector plus = prefix;
      apply_gate(plus, n, g, angle + kShift);
      ComplexVector minus = prefix;
      apply_gate(minus, n, g, angle - kShift);
      const double e_plus = energy_from(std::move(plus), k + 1, theta);
      const double e_minus = energy_from(std::move(minus), k + 1, theta);
      grad(*g.param_slot) += 0.5 * (e_plus - e_minus);
    }
    apply_gate(prefix, n, g, angle);
  }
  return grad;
}

RealVector EnergyEvaluator::gradient_finite_difference(const ParamVector& theta,
                                                       double step) const {
  check_theta(theta);
  if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be > 0");
  RealVector grad(theta.size());
  ParamVector probe = theta;
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    probe(j) = theta(j) + step;
    const double e_plus = energy(probe);
    probe(j) = theta(j) - step;
    const double e_minus = energy(probe);
    probe(j) = theta(j);
    grad(j) = (e_plus - e_minus) / (2.0 * step);
  }
  return grad;
}

double energy(const GateList& circuit, const ParamVector& theta,
              const ParentHamiltonian& hamiltonian) {
  return EnergyEvaluator(circuit, hamiltonian).energy(theta);
}

RealVector gradient_parameter_shift(const GateList& circuit, const ParamVector& theta,
                                    const ParentHamiltonian& hamiltonian) {
  return EnergyEvaluator(circuit, hamiltonian).gradient_parameter_shift(theta);
}

RealVector gradient_finite_difference(const GateList& circuit, const ParamVector& theta,
                                      const ParentHamiltonian& hamiltonian, double step) {
  return EnergyEvaluator(circuit, hamiltonian).gradient_finite_difference(theta, step);
}

}  // namespace phbench
