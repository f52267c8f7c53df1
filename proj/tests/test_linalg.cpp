#include <random>

#include "doctest.h"
#include "phbench/linalg.hpp"

using namespace phbench;
using namespace phbench::linalg;

namespace {

ComplexMatrix random_matrix(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(d(gen), d(gen));
  return m;
}

ComplexVector random_state(int num_qubits, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  ComplexVector v(Eigen::Index{1} << num_qubits);
  for (auto& x : v) x = Complex(d(gen), d(gen));
  return v / v.norm();
}

// Reference partial trace straight from the definition: sum over all basis
// states that agree on the kept qubits, qubit q at bit N-1-q.
ComplexMatrix brute_partial_trace(const ComplexVector& psi, int n_qubits,
                                  const std::vector<int>& keep) {
  const int k = static_cast<int>(keep.size());
  ComplexMatrix rho = ComplexMatrix::Zero(Eigen::Index{1} << k, Eigen::Index{1} << k);
  const auto local = [&](std::size_t full) {
    std::size_t idx = 0;
    for (int j = 0; j < k; ++j) idx = (idx << 1) | ((full >> (n_qubits - 1 - keep[j])) & 1u);
    return idx;
  };
  std::size_t keep_mask = 0;
  for (int q : keep) keep_mask |= std::size_t{1} << (n_qubits - 1 - q);
  const std::size_t dim = std::size_t{1} << n_qubits;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      if ((a & ~keep_mask) == (b & ~keep_mask))
        rho(local(a), local(b)) += psi(a) * std::conj(psi(b));
  return rho;
}

}  // namespace

TEST_CASE("eigh reconstructs Hermitian matrices") {
  std::mt19937_64 gen(3);
  for (int n : {1, 2, 5, 16, 33}) {
    const ComplexMatrix a = random_matrix(n, gen);
    const ComplexMatrix h = a + a.adjoint();
    const EigenDecomposition e = eigh(h);
    for (Eigen::Index k = 1; k < n; ++k) CHECK(e.values(k - 1) <= e.values(k));
    const ComplexMatrix rebuilt =
        e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
    CHECK((rebuilt - h).norm() < 1e-10 * std::max(1.0, h.norm()));
    CHECK((e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
    CHECK((eigvalsh(h) - e.values).norm() < 1e-10 * h.norm());
  }
}

TEST_CASE("eigh_lowest matches the full decomposition") {
  std::mt19937_64 gen(4);
  const ComplexMatrix a = random_matrix(40, gen);
  const ComplexMatrix h = a + a.adjoint();
  const EigenDecomposition full = eigh(h);
  const EigenDecomposition low = eigh_lowest(h, 3);
  REQUIRE(low.values.size() == 3);
  REQUIRE(low.vectors.cols() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(low.values(k) == doctest::Approx(full.values(k)).epsilon(1e-10));
    CHECK((h * low.vectors.col(k) - low.values(k) * low.vectors.col(k)).norm() < 1e-9);
  }
}

TEST_CASE("eigh rejects non-Hermitian input") {
  ComplexMatrix m(2, 2);
  m << 0, 1, 0, 0;
  CHECK_FALSE(is_hermitian(m));
  CHECK_THROWS_AS(eigh(m), std::invalid_argument);
}

TEST_CASE("nullspace of a PSD matrix with known kernel") {
  std::mt19937_64 gen(5);
  const ComplexMatrix r = random_matrix(8, gen);
  const ComplexMatrix u = eigh(r + r.adjoint()).vectors;
  RealVector d(8);
  d << 0, 0, 0, 0.5, 1, 2, 3, 4;
  const ComplexMatrix m = u * d.cast<Complex>().asDiagonal() * u.adjoint();
  const ComplexMatrix k = nullspace_hermitian(m);
  REQUIRE(k.cols() == 3);
  CHECK((m * k).norm() < 1e-10);
  CHECK((k.adjoint() * k - ComplexMatrix::Identity(3, 3)).norm() < 1e-10);
  // The kernel spans the first three eigenvectors.
  const ComplexMatrix p = k * k.adjoint();
  CHECK((p - u.leftCols(3) * u.leftCols(3).adjoint()).norm() < 1e-10);

  CHECK(nullspace_hermitian(ComplexMatrix::Identity(4, 4)).cols() == 0);
  CHECK(nullspace_hermitian(ComplexMatrix::Zero(4, 4)).cols() == 4);
  CHECK_THROWS(nullspace_hermitian(-ComplexMatrix::Identity(2, 2)));
}

TEST_CASE("kron of Pauli matrices") {
  ComplexMatrix x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  const ComplexMatrix xz = kron(x, z);
  ComplexMatrix expected(4, 4);
  expected << 0, 0, 1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, -1, 0, 0;
  CHECK((xz - expected).norm() == 0.0);
  CHECK(qubit_count(16) == 4);
  CHECK_THROWS(qubit_count(12));
}

TEST_CASE("cyclic windows") {
  const int n = 6;
  const std::vector<int> wrap = {4, 5, 0};
  const CyclicWindow w = CyclicWindow::from_qubits(wrap, n);
  CHECK(w.start == 4);
  CHECK(w.length == 3);
  CHECK(w.qubit(2, n) == 0);
  const std::vector<int> gap = {0, 2};
  CHECK_THROWS_AS(CyclicWindow::from_qubits(gap, n), std::invalid_argument);
  CHECK_THROWS(CyclicWindow{0, 7}.validate(n));
  CHECK_THROWS(CyclicWindow{6, 1}.validate(n));
}

TEST_CASE("partial trace matches the brute-force definition") {
  std::mt19937_64 gen(6);
  for (int n : {2, 3, 5, 6}) {
    const ComplexVector psi = random_state(n, gen);
    for (int start = 0; start < n; ++start) {
      for (int len = 1; len <= n; ++len) {
        std::vector<int> keep;
        for (int j = 0; j < len; ++j) keep.push_back((start + j) % n);
        const ComplexMatrix rho = partial_trace(psi, n, {start, len});
        const ComplexMatrix ref = brute_partial_trace(psi, n, keep);
        CHECK((rho - ref).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(std::abs(rho.trace() - Complex(1.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("product state marginals") {
  // |0>|1>|+>: single-qubit marginals are pure.
  ComplexVector psi = ComplexVector::Zero(8);
  psi(0b010) = psi(0b011) = 1.0 / std::sqrt(2.0);
  ComplexMatrix r1 = partial_trace(psi, 3, {1, 1});
  CHECK(std::abs(r1(1, 1) - 1.0) < 1e-15);
  ComplexMatrix r2 = partial_trace(psi, 3, {2, 1});
  CHECK(std::abs(r2(0, 1) - 0.5) < 1e-15);
}

TEST_CASE("embed agrees with kron on wrapping windows") {
  std::mt19937_64 gen(7);
  const int n = 4;
  const ComplexMatrix op = random_matrix(4, gen);
  const ComplexMatrix id2 = ComplexMatrix::Identity(2, 2);
  // Window (3, 0): local qubit order 3 then 0.
  const ComplexMatrix embedded = embed(op, n, {3, 2});
  // Build the same operator by kron on order (3,0,1,2) and permuting back.
  const ComplexMatrix permuted = kron(kron(op, id2), id2);
  const auto to_perm = [](std::size_t full) {
    const std::size_t q0 = (full >> 3) & 1, q1 = (full >> 2) & 1, q2 = (full >> 1) & 1,
                      q3 = full & 1;
    return (q3 << 3) | (q0 << 2) | (q1 << 1) | q2;
  };
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = 0; b < 16; ++b)
      CHECK(std::abs(embedded(a, b) - permuted(to_perm(a), to_perm(b))) < 1e-14);
}

TEST_CASE("window index table enumerates each basis state once") {
  const int n = 5;
  const auto table = window_index_table(n, {3, 3});
  REQUIRE(table.size() == 32);
  std::vector<int> seen(32, 0);
  for (auto idx : table) ++seen[idx];
  for (int c : seen) CHECK(c == 1);
}
