#include <numbers>
#include <random>

#include "doctest.h"
#include "phbench/parent.hpp"

using namespace phbench;

namespace {

ParamVector random_theta(int size, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  ParamVector t(size);
  for (auto& x : t) x = u(gen);
  return t;
}

ComplexMatrix pauli(char c) {
  ComplexMatrix p(2, 2);
  if (c == 'I') p << 1, 0, 0, 1;
  if (c == 'X') p << 0, 1, 1, 0;
  if (c == 'Y') p << 0, Complex(0, -1), Complex(0, 1), 0;
  if (c == 'Z') p << 1, 0, 0, -1;
  return p;
}

ComplexMatrix label_matrix(const std::string& label) {
  ComplexMatrix m = ComplexMatrix::Identity(1, 1);
  for (char c : label) m = linalg::kron(m, pauli(c));
  return m;
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

}  // namespace

TEST_CASE("zero angles give single-qubit number operators") {
  const int n = 6;
  const ParentHamiltonian h = build_parent_hamiltonian({n, 3}, ParamVector::Zero(6));
  REQUIRE(h.terms().size() == static_cast<std::size_t>(n));
  ComplexMatrix one = ComplexMatrix::Zero(2, 2);
  one(1, 1) = 1.0;
  for (int i = 0; i < n; ++i) {
    const LocalTerm& t = h.terms()[i];
    CHECK(t.anchor == i);
    CHECK(t.span == 1);
    CHECK(t.kernel_dim == 1);
    CHECK((t.matrix - one).cwiseAbs().maxCoeff() < 1e-10);
  }
  const RealVector ev = exact_spectrum(h);
  int idx = 0;
  for (int k = 0; k <= n; ++k) {
    for (int m = 0; m < static_cast<int>(binomial(n, k)); ++m, ++idx)
      CHECK(std::abs(ev(idx) - k) < 1e-10);
  }
  CHECK(idx == (1 << n));
}

TEST_CASE("parent terms are projectors annihilating the answer state") {
  std::mt19937_64 gen(31);
  for (int depth : {1, 2, 3}) {
    const int n = 8;
    const AnsatzSpec spec{n, depth};
    const ParamVector theta = random_theta(spec.num_params(), gen);
    const ParentHamiltonian h = build_parent_hamiltonian(spec, theta);
    const ComplexVector psi = simulate(build_ansatz(spec), theta);
    const int span = h.terms().front().span;
    CHECK(span < n);
    for (const LocalTerm& t : h.terms()) {
      CHECK(t.span == span);
      CHECK((t.matrix * t.matrix - t.matrix).norm() < 1e-9);
      CHECK(linalg::is_hermitian(t.matrix, 1e-12));
      CHECK(t.kernel_dim == doctest::Approx(t.matrix.trace().real()).epsilon(1e-9));
      CHECK(t.kernel_dim >= 1);
      // The window marginal of psi lives in the complement of the projector.
      const ComplexMatrix rho = linalg::partial_trace(psi, n, {t.anchor, t.span});
      CHECK((t.matrix * rho).norm() < 1e-8);
    }
    // Two-site translation: anchor i and i+2 carry the same projector.
    for (int i = 0; i + 2 < n; ++i)
      CHECK((h.terms()[i].matrix - h.terms()[i + 2].matrix).norm() < 1e-9);
    CHECK(energy(build_ansatz(spec), theta, h) < 1e-9);

    // Minimality: one site fewer leaves some anchor with a full-rank marginal.
    if (span > 1) {
      bool some_full_rank = false;
      for (int anchor = 0; anchor < n; ++anchor) {
        const RealVector ev =
            linalg::eigvalsh(linalg::partial_trace(psi, n, {anchor, span - 1}));
        if (ev(0) > linalg::kernel_threshold(ev(ev.size() - 1), linalg::kDefaultKernelTol))
          some_full_rank = true;
      }
      CHECK(some_full_rank);
    }
  }
}

TEST_CASE("ground state of a small parent Hamiltonian") {
  std::mt19937_64 gen(32);
  const AnsatzSpec spec{8, 2};
  const ParamVector theta = random_theta(4, gen);
  const ParentHamiltonian h = build_parent_hamiltonian(spec, theta);
  const linalg::EigenDecomposition low = lowest_eigenpairs(h, 2);
  CHECK(std::abs(low.values(0)) < 1e-9);
  CHECK(low.values(1) > 1e-3);
  const ComplexVector psi = simulate(build_ansatz(spec), theta);
  CHECK(std::norm(low.vectors.col(0).dot(psi)) > 1 - 1e-9);
  const RealVector all = exact_spectrum(h);
  CHECK(all.minCoeff() > -1e-9);
  CHECK(std::abs(all(1) - low.values(1)) < 1e-9);
}

TEST_CASE("kernel projector") {
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  rho(0, 0) = 0.5;
  rho(3, 3) = 0.5;
  const ComplexMatrix p = kernel_projector(rho);
  CHECK(std::abs(p(1, 1) - 1.0) < 1e-12);
  CHECK(std::abs(p(2, 2) - 1.0) < 1e-12);
  CHECK(std::abs(p.trace() - 2.0) < 1e-12);
  CHECK_THROWS_AS(kernel_projector(ComplexMatrix::Identity(4, 4) / 4.0), std::runtime_error);
}

TEST_CASE("Pauli decomposition against explicit traces") {
  std::mt19937_64 gen(33);
  std::normal_distribution<double> d;
  const int span = 3;
  ComplexMatrix a(8, 8);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = Complex(d(gen), d(gen));
  const ComplexMatrix h = a + a.adjoint();
  const auto terms = pauli_decomposition(h, 0.0);
  CHECK(terms.size() == 64u);
  CHECK(terms.front().label == "III");
  CHECK(terms.back().label == "ZZZ");
  for (const PauliTerm& t : terms) {
    const Complex ref = (label_matrix(t.label) * h).trace() / 8.0;
    CHECK(std::abs(ref.imag()) < 1e-12);
    CHECK(t.coefficient == doctest::Approx(ref.real()).epsilon(1e-12));
    CHECK((pauli_string_matrix(t.label) - label_matrix(t.label)).norm() == 0.0);
  }
  CHECK((pauli_reconstruct(terms, span) - h).norm() < 1e-12);

  ComplexMatrix non_herm = ComplexMatrix::Zero(2, 2);
  non_herm(0, 1) = 1.0;
  CHECK_THROWS(pauli_decomposition(non_herm, 0.0));
}

TEST_CASE("Pauli form of the trivial projector") {
  ComplexMatrix one = ComplexMatrix::Zero(2, 2);
  one(1, 1) = 1.0;
  const auto terms = pauli_decomposition(one);
  REQUIRE(terms.size() == 2u);
  CHECK(terms[0].label == "I");
  CHECK(terms[0].coefficient == doctest::Approx(0.5));
  CHECK(terms[1].label == "Z");
  CHECK(terms[1].coefficient == doctest::Approx(-0.5));
}

TEST_CASE("Hamiltonian JSON round trip") {
  std::mt19937_64 gen(34);
  const AnsatzSpec spec{6, 2};
  const ParentHamiltonian h = build_parent_hamiltonian(spec, random_theta(4, gen));
  const nlohmann::json j = hamiltonian_to_json(h, true);
  CHECK(j.at("terms").size() == 6u);
  CHECK(j.at("terms")[0].contains("pauli"));
  const ParentHamiltonian back = hamiltonian_from_json(nlohmann::json::parse(j.dump()));
  REQUIRE(back.provenance().has_value());
  CHECK(back.provenance()->spec == spec);
  CHECK(back.provenance()->theta_ans == h.provenance()->theta_ans);
  for (std::size_t i = 0; i < h.terms().size(); ++i) {
    CHECK(back.terms()[i].matrix == h.terms()[i].matrix);
    CHECK(back.terms()[i].kernel_dim == h.terms()[i].kernel_dim);
  }
}

TEST_CASE("Hamiltonian validation") {
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  CHECK_THROWS(ParentHamiltonian(4, {{0, 1, bad, 0}}));
  CHECK_THROWS(ParentHamiltonian(4, {{0, 2, ComplexMatrix::Identity(2, 2), 0}}));
  CHECK_THROWS(ParentHamiltonian(4, {{4, 1, ComplexMatrix::Identity(2, 2), 0}}));
  CHECK_THROWS(dense_matrix(ParentHamiltonian(kMaxDenseQubits + 1, {})));
}
