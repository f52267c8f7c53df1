#include "phbench/optim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace phbench::optim {

std::string to_string(Method method) {
  switch (method) {
    case Method::CG: return "cg";
    case Method::BFGS: return "bfgs";
    case Method::NelderMead: return "nelder-mead";
  }
  return "?";
}

Method method_from_string(const std::string& name) {
  std::string lower(name.size(), ' ');
  std::transform(name.begin(), name.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "cg") return Method::CG;
  if (lower == "bfgs") return Method::BFGS;
  if (lower == "nelder-mead" || lower == "neldermead" || lower == "nm") return Method::NelderMead;
  throw std::invalid_argument(fmt::format("unknown optimizer '{}'", name));
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::ConvergedGrad: return "converged-grad";
    case Termination::ConvergedF: return "converged-f";
    case Termination::MaxIters: return "max-iters";
  }
  return "?";
}

Termination termination_from_string(const std::string& name) {
  if (name == "converged-grad") return Termination::ConvergedGrad;
  if (name == "converged-f") return Termination::ConvergedF;
  if (name == "max-iters") return Termination::MaxIters;
  throw std::invalid_argument(fmt::format("unknown termination status '{}'", name));
}

OptimizerConfig OptimizerConfig::defaults(Method method) {
  OptimizerConfig cfg;
  cfg.method = method;
  cfg.c2 = method == Method::CG ? 0.1 : 0.9;
  return cfg;
}

void OptimizerConfig::validate() const {
  if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
    throw std::invalid_argument(fmt::format("need 0 < c1 < c2 < 1, got c1={} c2={}", c1, c2));
  if (!(grad_tol > 0.0) || !(f_tol >= 0.0))
    throw std::invalid_argument("grad_tol must be positive and f_tol non-negative");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (max_line_search_evals < 2) throw std::invalid_argument("max_line_search_evals must be >= 2");
  if (!(simplex_step > 0.0)) throw std::invalid_argument("simplex_step must be positive");
}

namespace {

struct Sample {
  double alpha = 0.0;
  double value = 0.0;
  std::optional<double> slope;
};

// Minimizer of the cubic (both slopes known) or quadratic (slope at `a`
// only) interpolant, falling back to bisection outside the safe interior.
double interpolate(const Sample& a, const Sample& b) {
  const double lo = std::min(a.alpha, b.alpha);
  const double hi = std::max(a.alpha, b.alpha);
  const double margin = 0.1 * (hi - lo);
  const double mid = 0.5 * (lo + hi);
  double trial = std::numeric_limits<double>::quiet_NaN();
  const double da = *a.slope;
  if (b.slope) {
    const double db = *b.slope;
    const double d1 = da + db - 3.0 * (a.value - b.value) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - da * db;
    if (disc >= 0.0) {
      const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
      const double denom = db - da + 2.0 * d2;
      if (denom != 0.0) trial = b.alpha - (b.alpha - a.alpha) * (db + d2 - d1) / denom;
    }
  } else {
    const double step = b.alpha - a.alpha;
    const double curvature = b.value - a.value - da * step;
    if (curvature > 0.0) trial = a.alpha - da * step * step / (2.0 * curvature);
  }
  if (!std::isfinite(trial) || trial < lo + margin || trial > hi - margin) return mid;
  return trial;
}

}  // namespace

LineSearchResult wolfe_line_search(const Objective& obj, const RealVector& point,
                                   double value, const RealVector& gradient,
                                   const RealVector& direction, const OptimizerConfig& cfg,
                                   double initial_step) {
  const double slope0 = gradient.dot(direction);
  if (!(slope0 < 0.0)) {
    throw std::invalid_argument(
        fmt::format("line search direction is not a descent direction (g.d = {})", slope0));
  }
  LineSearchResult res;
  const auto eval_value = [&](double alpha) {
    ++res.function_evals;
    return obj.value(point + alpha * direction);
  };
  const auto eval_grad = [&](double alpha) {
    ++res.gradient_evals;
    return obj.gradient(point + alpha * direction);
  };
  const auto armijo = [&](double alpha, double f) { return f <= value + cfg.c1 * alpha * slope0; };
  const auto curvature_ok = [&](double slope) { return std::abs(slope) <= -cfg.c2 * slope0; };

  const auto accept = [&](double alpha, double f, RealVector g) {
    res.alpha = alpha;
    res.value = f;
    res.gradient = std::move(g);
    res.ok = true;
    return res;
  };

  // Keeps the best Armijo point seen so a failed search can still report it.
  Sample best{0.0, value, slope0};
  RealVector best_gradient = gradient;

  const auto zoom = [&](Sample lo, Sample hi) -> LineSearchResult {
    while (res.function_evals < cfg.max_line_search_evals) {
      const double alpha = interpolate(lo, hi);
      if (!(std::abs(hi.alpha - lo.alpha) > 1e-16 * std::max(1.0, std::abs(alpha)))) break;
      const double f = eval_value(alpha);
      if (!std::isfinite(f) || !armijo(alpha, f) || f >= lo.value) {
        hi = {alpha, f, std::nullopt};
        continue;
      }
      RealVector g = eval_grad(alpha);
      const double slope = g.dot(direction);
      if (f < best.value) {
        best = {alpha, f, slope};
        best_gradient = g;
      }
      if (curvature_ok(slope)) return accept(alpha, f, std::move(g));
      if (slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = {alpha, f, slope};
    }
    res.alpha = best.alpha;
    res.value = best.value;
    res.gradient = best_gradient;
    res.ok = false;
    return res;
  };

  Sample prev{0.0, value, slope0};
  double alpha = initial_step > 0.0 ? initial_step : 1.0;
  constexpr double kMaxStep = 1e10;
  for (bool first = true; res.function_evals < cfg.max_line_search_evals; first = false) {
    const double f = eval_value(alpha);
    if (!std::isfinite(f) || !armijo(alpha, f) || (!first && f >= prev.value))
      return zoom(prev, {alpha, f, std::nullopt});
    RealVector g = eval_grad(alpha);
    const double slope = g.dot(direction);
    if (f < best.value) {
      best = {alpha, f, slope};
      best_gradient = g;
    }
    if (curvature_ok(slope)) return accept(alpha, f, std::move(g));
    if (slope >= 0.0) return zoom({alpha, f, slope}, prev);
    prev = {alpha, f, slope};
    if (alpha >= kMaxStep) break;
    alpha = std::min(2.0 * alpha, kMaxStep);
  }
  res.alpha = best.alpha;
  res.value = best.value;
  res.gradient = best_gradient;
  res.ok = false;
  return res;
}

double gradient_check(const Objective& obj, const RealVector& point, double step) {
  const RealVector g = obj.gradient(point);
  RealVector probe = point;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < point.size(); ++j) {
    probe(j) = point(j) + step;
    const double fp = obj.value(probe);
    probe(j) = point(j) - step;
    const double fm = obj.value(probe);
    probe(j) = point(j);
    const double fd = (fp - fm) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - g(j)) / std::max(1.0, std::abs(g(j))));
  }
  return worst;
}

namespace {

OptimizationTrace minimize_gradient(const Objective& obj, const RealVector& start,
                                    const OptimizerConfig& cfg) {
  const bool bfgs = cfg.method == Method::BFGS;
  const Eigen::Index n = start.size();
  OptimizationTrace trace;
  RealVector x = start;
  double f = obj.value(x);
  RealVector g = obj.gradient(x);
  trace.function_evals = 1;
  trace.gradient_evals = 1;

  const auto finish = [&](Termination t) {
    trace.final_params = x;
    trace.final_value = f;
    trace.termination = t;
    return trace;
  };
  if (g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) return finish(Termination::ConvergedGrad);

  Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
  RealVector d = -g;
  double prev_alpha = 0.0;
  double prev_slope = 0.0;

  while (trace.iterations < cfg.max_iters) {
    if (bfgs) d = -inv_hessian * g;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // Not a descent direction: restart from steepest descent.
      if (bfgs) inv_hessian.setIdentity();
      d = -g;
      slope = g.dot(d);
    }
    double initial_step = 1.0;
    if (!bfgs) {
      initial_step = trace.iterations == 0
                         ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>())
                         : std::clamp(prev_alpha * prev_slope / slope, 1e-10, 1e10);
    }
    const LineSearchResult ls = wolfe_line_search(obj, x, f, g, d, cfg, initial_step);
    trace.function_evals += ls.function_evals;
    trace.gradient_evals += ls.gradient_evals;
    ++trace.iterations;
    if (!ls.ok) {
      trace.line_search_failed = true;
      if (ls.alpha > 0.0 && ls.value < f) {
        x += ls.alpha * d;
        f = ls.value;
      }
      return finish(Termination::MaxIters);
    }

    const RealVector s = ls.alpha * d;
    const RealVector y = ls.gradient - g;
    const double f_old = f;
    x += s;
    f = ls.value;
    if (bfgs) {
      const double ys = y.dot(s);
      if (ys > 1e-12 * s.norm() * y.norm()) {
        const double rho = 1.0 / ys;
        const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
        inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
      }
    } else {
      const double beta = std::max(0.0, ls.gradient.dot(y) / g.squaredNorm());
      d = -ls.gradient + beta * d;
    }
    prev_alpha = ls.alpha;
    prev_slope = slope;
    g = ls.gradient;

    if (g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) return finish(Termination::ConvergedGrad);
    if (std::abs(f_old - f) <= cfg.f_tol) return finish(Termination::ConvergedF);
  }
  return finish(Termination::MaxIters);
}

OptimizationTrace minimize_nelder_mead(const Objective& obj, const RealVector& start,
                                       const OptimizerConfig& cfg) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  const Eigen::Index n = start.size();
  OptimizationTrace trace;
  std::vector<RealVector> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) simplex[j + 1](j) += cfg.simplex_step;
  const auto eval = [&](const RealVector& x) {
    ++trace.function_evals;
    return obj.value(x);
  };
  for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) values[k] = eval(simplex[k]);

  std::vector<std::size_t> order(n + 1);
  const auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<RealVector> s2;
    std::vector<double> v2;
    for (std::size_t k : order) {
      s2.push_back(simplex[k]);
      v2.push_back(values[k]);
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  Termination status = Termination::MaxIters;
  sort_simplex();
  while (trace.iterations < cfg.max_iters) {
    if (values.back() - values.front() <= cfg.f_tol) {
      status = Termination::ConvergedF;
      break;
    }
    ++trace.iterations;
    RealVector centroid = RealVector::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) centroid += simplex[k];
    centroid /= static_cast<double>(n);

    const RealVector& worst = simplex[n];
    const RealVector reflected = centroid + kReflect * (centroid - worst);
    const double fr = eval(reflected);
    bool shrink = false;
    if (fr < values[0]) {
      const RealVector expanded = centroid + kExpand * (reflected - centroid);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        values[n] = fe;
      } else {
        simplex[n] = reflected;
        values[n] = fr;
      }
    } else if (fr < values[n - 1]) {
      simplex[n] = reflected;
      values[n] = fr;
    } else if (fr < values[n]) {
      const RealVector outside = centroid + kContract * (reflected - centroid);
      const double fc = eval(outside);
      if (fc <= fr) {
        simplex[n] = outside;
        values[n] = fc;
      } else {
        shrink = true;
      }
    } else {
      const RealVector inside = centroid + kContract * (worst - centroid);
      const double fc = eval(inside);
      if (fc < values[n]) {
        simplex[n] = inside;
        values[n] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (Eigen::Index k = 1; k <= n; ++k) {
        simplex[k] = simplex[0] + kShrink * (simplex[k] - simplex[0]);
        values[k] = eval(simplex[k]);
      }
    }
    sort_simplex();
  }
  trace.final_params = simplex[0];
  trace.final_value = values[0];
  trace.termination = status;
  return trace;
}

}  // namespace

OptimizationTrace minimize(const Objective& obj, const RealVector& start,
                           const OptimizerConfig& cfg) {
  cfg.validate();
  if (obj.dim != start.size()) {
    throw std::invalid_argument(fmt::format(
        "objective has dimension {} but the start point has {}", obj.dim, start.size()));
  }
  if (!obj.value) throw std::invalid_argument("objective has no value function");
  if (cfg.method == Method::NelderMead) return minimize_nelder_mead(obj, start, cfg);
  if (!obj.has_gradient()) {
    throw std::invalid_argument(
        fmt::format("{} needs a gradient", to_string(cfg.method)));
  }
#ifndef NDEBUG
  if (const double err = gradient_check(obj, start); err > 1e-5) {
    throw std::invalid_argument(fmt::format(
        "objective gradient disagrees with finite differences by {:.3e}", err));
  }
#endif
  return minimize_gradient(obj, start, cfg);
}

}  // namespace phbench::optim
