// Unconstrained minimizers: Polak-Ribiere conjugate gradient and BFGS with a
// strong-Wolfe line search, and gradient-free Nelder-Mead.

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "phbench/linalg.hpp"

namespace phbench::optim {

struct Objective {
  std::function<double(const RealVector&)> value;
  std::function<RealVector(const RealVector&)> gradient;  // may be empty
  int dim = 0;

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

enum class Method { CG, BFGS, NelderMead };

std::string to_string(Method method);
/// Accepts "cg", "bfgs", "nelder-mead" (case-insensitive).
Method method_from_string(const std::string& name);

struct OptimizerConfig {
  Method method = Method::BFGS;
  double grad_tol = 1e-8;
  double f_tol = 1e-12;
  int max_iters = 10000;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search_evals = 60;
  double simplex_step = 0.1;  // Nelder-Mead initial edge length

  /// Method defaults: c2 = 0.1 for CG, 0.9 otherwise.
  static OptimizerConfig defaults(Method method);
  void validate() const;
};

enum class Termination { ConvergedGrad, ConvergedF, MaxIters };

std::string to_string(Termination t);
Termination termination_from_string(const std::string& name);

struct OptimizationTrace {
  RealVector final_params;
  double final_value = 0.0;
  int iterations = 0;
  int function_evals = 0;
  int gradient_evals = 0;
  Termination termination = Termination::MaxIters;
  bool line_search_failed = false;
};

struct LineSearchResult {
  double alpha = 0.0;
  double value = 0.0;
  RealVector gradient;
  int function_evals = 0;
  int gradient_evals = 0;
  bool ok = false;
};

/// Strong-Wolfe bracketing/zoom search along `direction` from `point`, given
/// f and its gradient there. Throws std::invalid_argument if `direction` is
/// not a descent direction. `initial_step` seeds the first trial step.
LineSearchResult wolfe_line_search(const Objective& obj, const RealVector& point,
                                   double value, const RealVector& gradient,
                                   const RealVector& direction, const OptimizerConfig& cfg,
                                   double initial_step = 1.0);

OptimizationTrace minimize(const Objective& obj, const RealVector& start,
                           const OptimizerConfig& cfg);

/// Largest |analytic - central difference| over components, normalised by
/// max(1, |analytic|).
double gradient_check(const Objective& obj, const RealVector& point, double step = 1e-6);

}  // namespace phbench::optim
