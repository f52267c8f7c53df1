#include "phbench/mps.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "json_util.hpp"

namespace phbench {

PeriodicMPS::PeriodicMPS(std::vector<SiteTensor> families, std::vector<int> site_family)
    : families_(std::move(families)), site_family_(std::move(site_family)) {
  if (families_.empty() || site_family_.empty())
    throw std::invalid_argument("PeriodicMPS needs at least one site and one tensor");
  bond_dim_ = static_cast<int>(families_[0][0].rows());
  for (const SiteTensor& t : families_) {
    for (const ComplexMatrix& m : t) {
      if (m.rows() != bond_dim_ || m.cols() != bond_dim_) {
        throw std::invalid_argument(fmt::format(
            "site matrix is {}x{}, expected {}x{}", m.rows(), m.cols(), bond_dim_, bond_dim_));
      }
    }
  }
  for (int f : site_family_) {
    if (f < 0 || f >= static_cast<int>(families_.size()))
      throw std::invalid_argument(fmt::format("site family index {} out of range", f));
  }
}

PeriodicMPS PeriodicMPS::uniform(SiteTensor tensor, int num_sites) {
  return PeriodicMPS({std::move(tensor)}, std::vector<int>(num_sites, 0));
}

namespace {

using Mat2 = Eigen::Matrix2cd;

Mat2 rx(double t) {
  const double c = std::cos(0.5 * t), s = std::sin(0.5 * t);
  Mat2 m;
  m << c, Complex(0, -s), Complex(0, -s), c;
  return m;
}

Mat2 rz(double t) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::polar(1.0, -0.5 * t);
  m(1, 1) = std::polar(1.0, 0.5 * t);
  return m;
}

// Single-qubit factor a CZ leaves on one of its qubits once the bond bit is
// fixed: Z^bit on the left qubit of the pair, |bit><bit| on the right qubit.
Mat2 cz_factor(bool left_qubit, int bit) {
  Mat2 m = Mat2::Zero();
  if (left_qubit) {
    m(0, 0) = 1.0;
    m(1, 1) = bit ? -1.0 : 1.0;
  } else {
    m(bit, bit) = 1.0;
  }
  return m;
}

// Sites of even parity are the left qubit of blue blocks and the right qubit
// of red blocks; odd sites the reverse. The left bond of a site always feeds a
// projector factor, the right bond a Z^bit factor.
SiteTensor site_family(const AnsatzSpec& spec, const ParamVector& theta, int parity) {
  const int depth = spec.depth;
  const int bond = 1 << depth;
  SiteTensor out{ComplexMatrix(bond, bond), ComplexMatrix(bond, bond)};
  for (int a = 0; a < bond; ++a) {
    for (int b = 0; b < bond; ++b) {
      Mat2 op = Mat2::Identity();
      for (int d = 0; d < depth; ++d) {
        const int left_bit = (a >> d) & 1;
        const int right_bit = (b >> d) & 1;
        const double tb = theta(2 * d), tr = theta(2 * d + 1);
        const Mat2 blue_cz = parity == 0 ? cz_factor(true, right_bit) : cz_factor(false, left_bit);
        const Mat2 red_cz = parity == 0 ? cz_factor(false, left_bit) : cz_factor(true, right_bit);
        op = rz(tb) * blue_cz * rx(tb) * op;
        op = rz(tr) * red_cz * rx(tr) * op;
      }
      out[0](a, b) = op(0, 0);
      out[1](a, b) = op(1, 0);
    }
  }
  return out;
}

ComplexMatrix identity_transfer(int bond) {
  return ComplexMatrix::Identity(bond * bond, bond * bond);
}

// All 2^L products A_{i_1} ... A_{i_L} over sites first, first+1, ...,
// indexed with the first site as most significant bit.
std::vector<ComplexMatrix> string_products(const PeriodicMPS& mps, int first, int length) {
  const int bond = mps.bond_dim();
  std::vector<ComplexMatrix> products{ComplexMatrix::Identity(bond, bond)};
  for (int j = 0; j < length; ++j) {
    const SiteTensor& t = mps.site((first + j) % mps.num_sites());
    std::vector<ComplexMatrix> next(products.size() * 2);
    for (std::size_t w = 0; w < products.size(); ++w) {
      next[2 * w] = products[w] * t[0];
      next[2 * w + 1] = products[w] * t[1];
    }
    products = std::move(next);
  }
  return products;
}

// Rows are the products flattened row-major: column index alpha * D + beta.
ComplexMatrix flatten_rows(const std::vector<ComplexMatrix>& products, int bond) {
  ComplexMatrix out(static_cast<Eigen::Index>(products.size()), bond * bond);
  for (std::size_t w = 0; w < products.size(); ++w)
    for (int a = 0; a < bond; ++a)
      for (int b = 0; b < bond; ++b) out(static_cast<Eigen::Index>(w), a * bond + b) = products[w](a, b);
  return out;
}

}  // namespace

PeriodicMPS ansatz_to_mps(const AnsatzSpec& spec, const ParamVector& theta) {
  spec.validate();
  if (theta.size() != spec.num_params()) {
    throw std::invalid_argument(fmt::format(
        "ansatz_to_mps: expected {} parameters, got {}", spec.num_params(), theta.size()));
  }
  std::vector<int> families(spec.num_qubits);
  for (int k = 0; k < spec.num_qubits; ++k) families[k] = k % 2;
  return PeriodicMPS({site_family(spec, theta, 0), site_family(spec, theta, 1)},
                     std::move(families));
}

ComplexMatrix transfer_operator(const SiteTensor& tensor) {
  return linalg::kron(tensor[0], tensor[0].conjugate()) +
         linalg::kron(tensor[1], tensor[1].conjugate());
}

double mps_norm_squared(const PeriodicMPS& mps) {
  ComplexMatrix e = identity_transfer(mps.bond_dim());
  for (int k = 0; k < mps.num_sites(); ++k) e = e * transfer_operator(mps.site(k));
  return e.trace().real();
}

ComplexVector mps_to_statevector(const PeriodicMPS& mps) {
  const int n = mps.num_sites();
  if (n > kMaxStatevectorSites) {
    throw std::invalid_argument(fmt::format(
        "mps_to_statevector: {} sites would need 2^{} amplitudes (limit {} sites)", n, n,
        kMaxStatevectorSites));
  }
  const int bond = mps.bond_dim();
  ComplexVector out(Eigen::Index{1} << n);
  // Depth-first over basis strings; prefix[k] is the product of the first k matrices.
  std::vector<ComplexMatrix> prefix(n, ComplexMatrix::Identity(bond, bond));
  const auto recurse = [&](auto&& self, int site, Eigen::Index index) -> void {
    const SiteTensor& t = mps.site(site);
    for (int s = 0; s < 2; ++s) {
      const Eigen::Index next = (index << 1) | s;
      if (site == n - 1) {
        // Tr[P A] without forming the product.
        out(next) = prefix[site].cwiseProduct(t[s].transpose()).sum();
      } else {
        prefix[site + 1].noalias() = prefix[site] * t[s];
        self(self, site + 1, next);
      }
    }
  };
  recurse(recurse, 0, 0);
  const double norm = out.norm();
  if (!(norm > 0.0)) throw std::runtime_error("mps_to_statevector: state has zero norm");
  return out / norm;
}

ComplexMatrix reduced_density(const PeriodicMPS& mps, int anchor, int n) {
  const int sites = mps.num_sites();
  if (n < 1 || n > sites) {
    throw std::invalid_argument(
        fmt::format("reduced_density: window length {} outside [1, {}]", n, sites));
  }
  if (anchor < 0 || anchor >= sites)
    throw std::invalid_argument(fmt::format("reduced_density: anchor {} out of range", anchor));
  const int bond = mps.bond_dim();
  const int bb = bond * bond;

  ComplexMatrix env = identity_transfer(bond);
  ComplexMatrix full = identity_transfer(bond);
  for (int j = 0; j < sites; ++j) {
    const ComplexMatrix e = transfer_operator(mps.site((anchor + j) % sites));
    if (j >= n) env = env * e;
    full = full * e;
  }
  const double norm_sq = full.trace().real();

  // G[(a,b),(a',b')] = env[(b,b'),(a,a')], so rho = P G P^dag.
  ComplexMatrix g(bb, bb);
  for (int a = 0; a < bond; ++a)
    for (int b = 0; b < bond; ++b)
      for (int a2 = 0; a2 < bond; ++a2)
        for (int b2 = 0; b2 < bond; ++b2)
          g(a * bond + b, a2 * bond + b2) = env(b * bond + b2, a * bond + a2);

  const ComplexMatrix p = flatten_rows(string_products(mps, anchor, n), bond);
  const ComplexMatrix pg = p * g;
  const ComplexMatrix raw = pg * p.adjoint();
  return (raw + raw.adjoint()) * (0.5 / norm_sq);
}

int gamma_map_rank(const PeriodicMPS& mps, int L) {
  if (L < 1) throw std::invalid_argument("gamma_map_rank: L must be >= 1");
  const ComplexMatrix m = flatten_rows(string_products(mps, 0, L), mps.bond_dim());
  const Eigen::BDCSVD<ComplexMatrix> svd(m);
  const RealVector& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  const double cutoff = 1e-8 * sv(0);
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cutoff) ++rank;
  return rank;
}

std::optional<int> injectivity_length(const PeriodicMPS& mps, int L_max) {
  if (L_max < 1 || L_max > kMaxInjectivityLength) {
    throw std::invalid_argument(fmt::format(
        "injectivity_length: L_max {} outside [1, {}]", L_max, kMaxInjectivityLength));
  }
  const int full_rank = mps.bond_dim() * mps.bond_dim();
  for (int L = 1; L <= L_max; ++L)
    if (gamma_map_rank(mps, L) == full_rank) return L;
  return std::nullopt;
}

nlohmann::json mps_to_json(const PeriodicMPS& mps) {
  nlohmann::json families = nlohmann::json::array();
  for (const SiteTensor& t : mps.families())
    families.push_back({detail::matrix_to_json(t[0]), detail::matrix_to_json(t[1])});
  return {{"num_sites", mps.num_sites()},
          {"bond_dim", mps.bond_dim()},
          {"leg_order", "left_bond, physical, right_bond"},
          {"families", std::move(families)},
          {"site_family", mps.site_family()}};
}

}  // namespace phbench
