#pragma once

#include "json.hpp"

#include "phbench/linalg.hpp"

namespace phbench::detail {

// {"real": [[...], ...], "imag": [[...], ...]}, row-major nesting.
inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  const auto& re = j.at("real");
  const auto& im = j.at("imag");
  const auto rows = static_cast<Eigen::Index>(re.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(re[0].size());
  if (im.size() != re.size()) throw std::invalid_argument("matrix json: real/imag shape mismatch");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(re[i].size()) != cols ||
        static_cast<Eigen::Index>(im[i].size()) != cols)
      throw std::invalid_argument("matrix json: ragged rows");
    for (Eigen::Index j2 = 0; j2 < cols; ++j2)
      m(i, j2) = Complex(re[i][j2].get<double>(), im[i][j2].get<double>());
  }
  return m;
}

}  // namespace phbench::detail
