#include "phbench/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace phbench::linalg {

namespace {

void require_hermitian(const ComplexMatrix& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(
        fmt::format("{}: matrix is {}x{}, expected square", where, m.rows(), m.cols()));
  }
  if (!is_hermitian(m)) {
    throw std::invalid_argument(fmt::format(
        "{}: matrix is not Hermitian (max |m_ij - conj(m_ji)| = {:.3e})", where,
        hermiticity_defect(m)));
  }
}

// LAPACK reads only the lower triangle; symmetrize so both triangles agree.
ComplexMatrix symmetrized(const ComplexMatrix& m) {
  ComplexMatrix s = 0.5 * (m + m.adjoint());
  return s;
}

EigenDecomposition run_zheevd(const ComplexMatrix& m, bool want_vectors) {
  require_hermitian(m, "eigh");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  EigenDecomposition out;
  out.values.resize(n);
  if (n == 0) return out;
  ComplexMatrix a = symmetrized(m);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n, a.data(),
                     n, out.values.data());
  if (info != 0) {
    throw std::runtime_error(fmt::format("eigh: zheevd failed with info = {}", info));
  }
  if (want_vectors) out.vectors = std::move(a);
  return out;
}

}  // namespace

double hermiticity_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return hermiticity_defect(m) <= tol * scale;
}

EigenDecomposition eigh(const ComplexMatrix& m) { return run_zheevd(m, true); }

RealVector eigvalsh(const ComplexMatrix& m) { return run_zheevd(m, false).values; }

EigenDecomposition eigh_lowest(const ComplexMatrix& m, int count) {
  require_hermitian(m, "eigh_lowest");
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (count < 1 || count > n) {
    throw std::invalid_argument(
        fmt::format("eigh_lowest: count {} outside [1, {}]", count, n));
  }
  ComplexMatrix a = symmetrized(m);
  RealVector w(n);
  ComplexMatrix z(n, count);
  std::vector<lapack_int> isuppz(2 * static_cast<size_t>(count));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, a.data(), n, 0.0, 0.0, 1,
                     count, 0.0, &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != count) {
    throw std::runtime_error(
        fmt::format("eigh_lowest: zheevr failed (info = {}, found = {})", info, found));
  }
  return {w.head(count), z};
}

double kernel_threshold(double lambda_max, double tol) {
  double threshold = tol * lambda_max;
  if (lambda_max < 1.0) threshold = std::max(threshold, kKernelAbsFloor);
  return threshold;
}

ComplexMatrix nullspace_hermitian(const ComplexMatrix& m, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("nullspace_hermitian: tol must be > 0");
  const EigenDecomposition eig = eigh(m);
  const Eigen::Index n = eig.values.size();
  if (n == 0) return ComplexMatrix(0, 0);
  const double lambda_max = eig.values(n - 1);
  const double threshold = kernel_threshold(lambda_max, tol);
  if (eig.values(0) < -threshold) {
    throw std::invalid_argument(fmt::format(
        "nullspace_hermitian: matrix is not PSD (min eigenvalue {:.3e}, threshold {:.3e})",
        eig.values(0), threshold));
  }
  Eigen::Index kernel_dim = 0;
  while (kernel_dim < n && eig.values(kernel_dim) <= threshold) ++kernel_dim;
  return eig.vectors.leftCols(kernel_dim);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

int qubit_count(Eigen::Index dim) {
  if (dim < 1 || (dim & (dim - 1)) != 0) {
    throw std::invalid_argument(fmt::format("dimension {} is not a power of two", dim));
  }
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  return n;
}

void CyclicWindow::validate(int num_qubits) const {
  if (num_qubits < 1 || length < 1 || length > num_qubits || start < 0 ||
      start >= num_qubits) {
    throw std::invalid_argument(fmt::format(
        "invalid cyclic window (start {}, length {}) on {} qubits", start, length,
        num_qubits));
  }
}

CyclicWindow CyclicWindow::from_qubits(std::span<const int> qubits, int num_qubits) {
  if (qubits.empty()) throw std::invalid_argument("cyclic window: empty qubit list");
  CyclicWindow window{qubits[0], static_cast<int>(qubits.size())};
  window.validate(num_qubits);
  for (int j = 0; j < window.length; ++j) {
    if (qubits[j] != window.qubit(j, num_qubits)) {
      throw std::invalid_argument(fmt::format(
          "qubits do not form a cyclic window: position {} holds {}, expected {}", j,
          qubits[j], window.qubit(j, num_qubits)));
    }
  }
  return window;
}

std::vector<std::uint32_t> window_index_table(int num_qubits, CyclicWindow window) {
  window.validate(num_qubits);
  const int n = window.length;
  const int rest = num_qubits - n;
  std::vector<std::uint32_t> table(std::size_t{1} << num_qubits);
  // Bit position of every window / remainder qubit in the full index.
  std::vector<int> window_bits(n), rest_bits(rest);
  for (int j = 0; j < n; ++j) window_bits[j] = num_qubits - 1 - window.qubit(j, num_qubits);
  for (int j = 0; j < rest; ++j)
    rest_bits[j] = num_qubits - 1 - window.qubit(n + j, num_qubits);

  const std::uint32_t wdim = 1u << n;
  const std::uint32_t rdim = 1u << rest;
  for (std::uint32_t r = 0; r < rdim; ++r) {
    std::uint32_t rbase = 0;
    for (int j = 0; j < rest; ++j)
      if ((r >> (rest - 1 - j)) & 1u) rbase |= 1u << rest_bits[j];
    for (std::uint32_t w = 0; w < wdim; ++w) {
      std::uint32_t idx = rbase;
      for (int j = 0; j < n; ++j)
        if ((w >> (n - 1 - j)) & 1u) idx |= 1u << window_bits[j];
      table[w + r * wdim] = idx;
    }
  }
  return table;
}

ComplexMatrix window_matrix(const ComplexVector& state, int num_qubits,
                            CyclicWindow window) {
  if (state.size() != (Eigen::Index{1} << num_qubits)) {
    throw std::invalid_argument(fmt::format(
        "state has dimension {}, expected 2^{}", state.size(), num_qubits));
  }
  const auto table = window_index_table(num_qubits, window);
  const Eigen::Index wdim = Eigen::Index{1} << window.length;
  ComplexMatrix psi(wdim, state.size() / wdim);
  Complex* out = psi.data();  // column-major: entry (w, r) lives at w + r * wdim
  for (std::size_t k = 0; k < table.size(); ++k) out[k] = state(table[k]);
  return psi;
}

ComplexMatrix partial_trace(const ComplexVector& state, int num_qubits,
                            CyclicWindow window) {
  const ComplexMatrix psi = window_matrix(state, num_qubits, window);
  return psi * psi.adjoint();
}

ComplexMatrix embed(const ComplexMatrix& op, int num_qubits, CyclicWindow window) {
  const Eigen::Index wdim = Eigen::Index{1} << window.length;
  if (op.rows() != wdim || op.cols() != wdim) {
    throw std::invalid_argument(fmt::format(
        "embed: operator is {}x{}, window needs {}x{}", op.rows(), op.cols(), wdim, wdim));
  }
  const auto table = window_index_table(num_qubits, window);
  const Eigen::Index dim = Eigen::Index{1} << num_qubits;
  ComplexMatrix full = ComplexMatrix::Zero(dim, dim);
  const Eigen::Index rdim = dim / wdim;
  for (Eigen::Index r = 0; r < rdim; ++r) {
    const std::uint32_t* col = table.data() + r * wdim;
    for (Eigen::Index b = 0; b < wdim; ++b)
      for (Eigen::Index a = 0; a < wdim; ++a) full(col[a], col[b]) += op(a, b);
  }
  return full;
}

}  // namespace phbench::linalg
