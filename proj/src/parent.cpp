#include "phbench/parent.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "json_util.hpp"

namespace phbench {

ParentHamiltonian::ParentHamiltonian(int num_qubits, std::vector<LocalTerm> terms,
                                     std::optional<Provenance> provenance)
    : num_qubits_(num_qubits), terms_(std::move(terms)), provenance_(std::move(provenance)) {
  if (num_qubits_ < 1) throw std::invalid_argument("Hamiltonian needs at least one qubit");
  for (const LocalTerm& t : terms_) {
    linalg::CyclicWindow{t.anchor, t.span}.validate(num_qubits_);
    const Eigen::Index dim = Eigen::Index{1} << t.span;
    if (t.matrix.rows() != dim || t.matrix.cols() != dim) {
      throw std::invalid_argument(fmt::format(
          "term at anchor {} is {}x{}, span {} needs {}x{}", t.anchor, t.matrix.rows(),
          t.matrix.cols(), t.span, dim, dim));
    }
    if (!linalg::is_hermitian(t.matrix, 1e-10)) {
      throw std::invalid_argument(fmt::format(
          "term at anchor {} is not Hermitian (defect {:.3e})", t.anchor,
          linalg::hermiticity_defect(t.matrix)));
    }
  }
}

int minimal_support(const PeriodicMPS& mps, int n_max, double kernel_tol) {
  const int sites = mps.num_sites();
  if (n_max < 1 || n_max > sites) {
    throw std::invalid_argument(
        fmt::format("minimal_support: n_max {} outside [1, {}]", n_max, sites));
  }
  for (int n = 1; n <= n_max; ++n) {
    bool every_anchor = true;
    for (int anchor = 0; anchor < sites && every_anchor; ++anchor) {
      const ComplexMatrix kernel =
          linalg::nullspace_hermitian(reduced_density(mps, anchor, n), kernel_tol);
      every_anchor = kernel.cols() > 0;
    }
    if (every_anchor) return n;
  }
  throw std::runtime_error(fmt::format(
      "no window length up to {} gives a non-null kernel at every anchor", n_max));
}

ComplexMatrix kernel_projector(const ComplexMatrix& rho, double kernel_tol) {
  const ComplexMatrix basis = linalg::nullspace_hermitian(rho, kernel_tol);
  if (basis.cols() == 0) {
    throw std::runtime_error(
        "reduced density matrix has an empty kernel; widen the window");
  }
  return basis * basis.adjoint();
}

ParentHamiltonian build_parent_hamiltonian(const AnsatzSpec& spec,
                                           const ParamVector& theta_ans,
                                           double kernel_tol) {
  const PeriodicMPS mps = ansatz_to_mps(spec, theta_ans);
  const int n_sites = spec.num_qubits;
  const int span = minimal_support(mps, n_sites, kernel_tol);

  // Two-site translation invariance: one projector per sublattice.
  std::array<ComplexMatrix, 2> sublattice;
  for (int parity = 0; parity < 2; ++parity)
    sublattice[parity] = kernel_projector(reduced_density(mps, parity, span), kernel_tol);

  for (int anchor : {n_sites - 2, n_sites - 1}) {
    const ComplexMatrix direct =
        kernel_projector(reduced_density(mps, anchor, span), kernel_tol);
    const double defect = (direct - sublattice[anchor % 2]).norm();
    if (defect > 1e-9) {
      throw std::logic_error(fmt::format(
          "term at anchor {} differs from its translated copy by {:.3e}", anchor, defect));
    }
  }

  std::vector<LocalTerm> terms;
  terms.reserve(n_sites);
  for (int anchor = 0; anchor < n_sites; ++anchor) {
    const ComplexMatrix& h = sublattice[anchor % 2];
    const int rank = static_cast<int>(std::lround(h.trace().real()));
    terms.push_back({anchor, span, h, rank});
  }
  return ParentHamiltonian(n_sites, std::move(terms),
                           Provenance{spec, theta_ans, kernel_tol});
}

ComplexMatrix dense_matrix(const ParentHamiltonian& h) {
  const int n = h.num_qubits();
  if (n > kMaxDenseQubits) {
    throw std::invalid_argument(fmt::format(
        "dense diagonalization limited to {} qubits, got {}", kMaxDenseQubits, n));
  }
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  for (const LocalTerm& t : h.terms())
    full += linalg::embed(t.matrix, n, {t.anchor, t.span});
  return full;
}

RealVector exact_spectrum(const ParentHamiltonian& h) {
  return linalg::eigvalsh(dense_matrix(h));
}

linalg::EigenDecomposition lowest_eigenpairs(const ParentHamiltonian& h, int count) {
  return linalg::eigh_lowest(dense_matrix(h), count);
}

std::vector<PauliTerm> pauli_decomposition(const ComplexMatrix& term, double drop_below) {
  const int n = linalg::qubit_count(term.rows());
  if (term.cols() != term.rows()) throw std::invalid_argument("pauli_decomposition: not square");
  const std::uint32_t dim = 1u << n;
  const double residue_tol = 1e-10 * std::max(1.0, term.cwiseAbs().maxCoeff());
  static constexpr char kLetters[4] = {'I', 'X', 'Y', 'Z'};
  static const Complex kMinusIPow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};

  std::vector<PauliTerm> out;
  const std::uint64_t count = std::uint64_t{1} << (2 * n);
  std::string label(n, 'I');
  for (std::uint64_t code = 0; code < count; ++code) {
    std::uint32_t flip = 0, sign = 0;
    int num_y = 0;
    for (int j = 0; j < n; ++j) {
      const int letter = static_cast<int>((code >> (2 * (n - 1 - j))) & 3u);
      label[j] = kLetters[letter];
      const std::uint32_t bit = 1u << (n - 1 - j);
      if (letter == 1 || letter == 2) flip |= bit;
      if (letter == 2 || letter == 3) sign |= bit;
      if (letter == 2) ++num_y;
    }
    // P[r, r ^ flip] = (-i)^{#Y} (-1)^{popcount(r & sign)}.
    Complex trace = 0.0;
    for (std::uint32_t r = 0; r < dim; ++r) {
      const Complex h = term(r ^ flip, r);
      trace += (std::popcount(r & sign) & 1) ? -h : h;
    }
    trace *= kMinusIPow[num_y % 4];
    const Complex coeff = trace / static_cast<double>(dim);
    if (std::abs(coeff.imag()) > residue_tol) {
      throw std::invalid_argument(fmt::format(
          "pauli_decomposition: coefficient of {} has imaginary part {:.3e}", label,
          coeff.imag()));
    }
    if (std::abs(coeff.real()) >= drop_below && coeff.real() != 0.0)
      out.push_back({label, coeff.real()});
  }
  return out;
}

ComplexMatrix pauli_string_matrix(const std::string& label) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char c : label) {
    ComplexMatrix p(2, 2);
    switch (c) {
      case 'I': p << 1, 0, 0, 1; break;
      case 'X': p << 0, 1, 1, 0; break;
      case 'Y': p << 0, Complex(0, -1), Complex(0, 1), 0; break;
      case 'Z': p << 1, 0, 0, -1; break;
      default: throw std::invalid_argument(fmt::format("bad Pauli letter '{}'", c));
    }
    out = linalg::kron(out, p);
  }
  return out;
}

ComplexMatrix pauli_reconstruct(const std::vector<PauliTerm>& terms, int span) {
  const Eigen::Index dim = Eigen::Index{1} << span;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (const PauliTerm& t : terms) {
    if (static_cast<int>(t.label.size()) != span)
      throw std::invalid_argument(fmt::format("Pauli label {} has wrong length", t.label));
    out += t.coefficient * pauli_string_matrix(t.label);
  }
  return out;
}

nlohmann::json hamiltonian_to_json(const ParentHamiltonian& h, bool with_pauli,
                                   double drop_below) {
  nlohmann::json j;
  j["num_qubits"] = h.num_qubits();
  if (const auto& prov = h.provenance()) {
    j["depth"] = prov->spec.depth;
    j["theta_ans"] = std::vector<double>(prov->theta_ans.data(),
                                         prov->theta_ans.data() + prov->theta_ans.size());
    j["kernel_tol"] = prov->kernel_tol;
  } else {
    j["depth"] = nullptr;
    j["theta_ans"] = nullptr;
    j["kernel_tol"] = nullptr;
  }
  nlohmann::json terms = nlohmann::json::array();
  for (const LocalTerm& t : h.terms()) {
    nlohmann::json rec{{"anchor", t.anchor},
                       {"span", t.span},
                       {"kernel_dim", t.kernel_dim},
                       {"projector", detail::matrix_to_json(t.matrix)}};
    if (with_pauli) {
      nlohmann::json pauli = nlohmann::json::array();
      for (const PauliTerm& p : pauli_decomposition(t.matrix, drop_below))
        pauli.push_back({{"label", p.label}, {"coeff", p.coefficient}});
      rec["pauli"] = std::move(pauli);
    }
    terms.push_back(std::move(rec));
  }
  j["terms"] = std::move(terms);
  return j;
}

ParentHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
  const int n = j.at("num_qubits").get<int>();
  std::optional<Provenance> provenance;
  if (j.contains("depth") && !j.at("depth").is_null()) {
    Provenance p;
    p.spec = {n, j.at("depth").get<int>()};
    const auto theta = j.at("theta_ans").get<std::vector<double>>();
    p.theta_ans = Eigen::Map<const RealVector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
    p.kernel_tol = j.at("kernel_tol").get<double>();
    p.spec.validate();
    if (p.theta_ans.size() != p.spec.num_params()) {
      throw std::invalid_argument(fmt::format(
          "theta_ans has {} entries, depth {} needs {}", p.theta_ans.size(), p.spec.depth,
          p.spec.num_params()));
    }
    provenance = std::move(p);
  }
  std::vector<LocalTerm> terms;
  for (const auto& rec : j.at("terms")) {
    LocalTerm t;
    t.anchor = rec.at("anchor").get<int>();
    t.span = rec.at("span").get<int>();
    t.kernel_dim = rec.value("kernel_dim", 0);
    t.matrix = detail::matrix_from_json(rec.at("projector"));
    terms.push_back(std::move(t));
  }
  return ParentHamiltonian(n, std::move(terms), std::move(provenance));
}

}  // namespace phbench
