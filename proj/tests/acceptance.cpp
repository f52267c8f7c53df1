// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. The only argument is the path to the CLI.

#include <bit>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include <fmt/format.h>

#include "phbench/bench.hpp"

using namespace phbench;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

ParamVector random_theta(int size, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  ParamVector t(size);
  for (auto& x : t) x = u(gen);
  return t;
}

Outcome ac1() {
  const AnsatzSpec spec{12, 3};
  const GateList circuit = build_ansatz(spec);
  double worst = -1e300;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ParamVector theta = bench::sample_theta_ans(seed, spec.num_params());
    const ParentHamiltonian h = build_parent_hamiltonian(spec, theta);
    worst = std::max(worst, energy(circuit, theta, h));
  }
  return {worst <= 1e-9, fmt::format("max energy(theta_ans) over 20 instances = {:.3e}", worst)};
}

Outcome ac2() {
  const auto rows = bench::locality_scan({3}, {8, 10, 12, 14}, 20, 2);
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    ok = ok && r.max_support <= 7 && r.max_support < r.num_qubits;
    detail += fmt::format("N={}: min/avg/max = {}/{:.2f}/{}; ", r.num_qubits, r.min_support,
                          r.avg_support, r.max_support);
  }
  return {ok, detail};
}

Outcome ac3() {
  const AnsatzSpec spec{16, 3};
  std::map<int, int> histogram;
  int sevens = 0;
  const int draws = 20;
  for (std::uint64_t seed = 1; seed <= draws; ++seed) {
    const ParamVector theta = bench::sample_theta_ans(seed, spec.num_params());
    const auto len = injectivity_length(ansatz_to_mps(spec, theta), kMaxInjectivityLength);
    const int key = len ? *len : -1;
    ++histogram[key];
    if (key == 7) ++sevens;
  }
  std::string detail = "injectivity lengths:";
  for (auto [len, count] : histogram)
    detail += len < 0 ? fmt::format(" none x{}", count) : fmt::format(" {} x{}", len, count);
  detail += fmt::format("; fraction equal to 7 = {:.2f}", static_cast<double>(sevens) / draws);
  return {sevens >= 0.8 * draws, detail};
}

Outcome ac4() {
  const AnsatzSpec spec{12, 3};
  const ParamVector theta = bench::sample_theta_ans(1, spec.num_params());
  const ParentHamiltonian h = build_parent_hamiltonian(spec, theta);
  const linalg::EigenDecomposition e = linalg::eigh(dense_matrix(h));
  const ComplexVector psi = simulate(build_ansatz(spec), theta);
  const double fid = std::norm(e.vectors.col(0).dot(psi));
  const double l0 = e.values(0), l1 = e.values(1), lmin = e.values.minCoeff();
  const bool ok = std::abs(l0) <= 1e-8 && l1 > 1e-3 && lmin >= -1e-8 && fid >= 1 - 1e-6;
  return {ok, fmt::format("span {}, kernel_dim {}: lambda0 = {:.3e}, lambda1 = {:.4e}, min = "
                          "{:.3e}, fidelity = 1 - {:.3e}",
                          h.terms().front().span, h.terms().front().kernel_dim, l0, l1, lmin,
                          1 - fid)};
}

Outcome ac5() {
  std::mt19937_64 gen(5);
  double worst_rho = 0.0, worst_fid = 0.0;
  for (int n : {6, 8, 10, 12}) {
    const AnsatzSpec spec{n, 3};
    const GateList circuit = build_ansatz(spec);
    for (int rep = 0; rep < 20; ++rep) {
      const ParamVector theta = random_theta(spec.num_params(), gen);
      const PeriodicMPS mps = ansatz_to_mps(spec, theta);
      const ComplexVector psi = simulate(circuit, theta);
      const ComplexVector from_mps = mps_to_statevector(mps);
      worst_fid = std::max(worst_fid, std::abs(1.0 - std::norm(from_mps.dot(psi))));
      for (int anchor = 0; anchor < n; ++anchor) {
        for (int len = 1; len < n; ++len) {
          const ComplexMatrix diff = reduced_density(mps, anchor, len) -
                                     linalg::partial_trace(psi, n, {anchor, len});
          worst_rho = std::max(worst_rho, diff.cwiseAbs().maxCoeff());
        }
      }
    }
  }
  return {worst_rho <= 1e-9 && worst_fid <= 1e-9,
          fmt::format("max entrywise rho difference = {:.3e}, max |1 - fidelity| = {:.3e}",
                      worst_rho, worst_fid)};
}

Outcome ac6() {
  std::mt19937_64 gen(6);
  const int sizes[] = {6, 8, 10};
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const AnsatzSpec spec{sizes[k % 3], 3};
    const ParentHamiltonian h =
        build_parent_hamiltonian(spec, random_theta(spec.num_params(), gen));
    const EnergyEvaluator eval(build_ansatz(spec), h);
    const ParamVector theta = random_theta(spec.num_params(), gen);
    const RealVector diff =
        eval.gradient_parameter_shift(theta) - eval.gradient_finite_difference(theta, 1e-5);
    worst = std::max(worst, diff.cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, fmt::format("max |parameter shift - central difference| = {:.3e}", worst)};
}

Outcome ac7() {
  bench::ExperimentConfig cfg;
  cfg.num_qubits = 10;
  cfg.depth = 3;
  cfg.trials_per_r = 20;
  constexpr double pi = std::numbers::pi;
  cfg.r_grid = {pi / 16, pi / 8, pi / 4, pi / 2, 3 * pi / 4};
  const auto start = std::chrono::steady_clock::now();
  const bench::SweepResult result = bench::run_sweep(cfg);
  const double minutes =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;
  const auto& s = result.summary;
  const bool ok = s[0].success_rate >= 0.8 && s[1].success_rate >= 0.8 &&
                  s[4].success_rate <= s[0].success_rate - 0.3 && minutes < 30.0;
  std::string detail = "success rates:";
  for (const auto& row : s) detail += fmt::format(" r={:.4f}:{:.2f}", row.r, row.success_rate);
  detail += fmt::format("; {:.1f} min", minutes);
  return {ok, detail};
}

Outcome ac8() {
  const int n = 8;
  const AnsatzSpec spec{n, 3};
  const ParamVector zero = ParamVector::Zero(spec.num_params());
  const ParentHamiltonian h = build_parent_hamiltonian(spec, zero);
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix expected = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    expected(i, i) = static_cast<double>(std::popcount(static_cast<unsigned>(i)));
  const double h_err = (dense_matrix(h) - expected).cwiseAbs().maxCoeff();

  const RealVector ev = exact_spectrum(h);
  bool spectrum_ok = true;
  int idx = 0;
  for (int k = 0; k <= n; ++k) {
    int mult = 1;
    for (int j = 1; j <= k; ++j) mult = mult * (n - k + j) / j;
    for (int m = 0; m < mult; ++m, ++idx) spectrum_ok = spectrum_ok && std::abs(ev(idx) - k) < 1e-10;
  }
  const int support = minimal_support(ansatz_to_mps(spec, zero), n);
  return {h_err <= 1e-10 && spectrum_ok && support == 1,
          fmt::format("max |H - sum (I-Z)/2| = {:.3e}, binomial spectrum {}, minimal support {}",
                      h_err, spectrum_ok ? "ok" : "wrong", support)};
}

Outcome ac9() {
  optim::Objective rosen;
  rosen.dim = 2;
  rosen.value = [](const RealVector& x) {
    return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
  };
  rosen.gradient = [](const RealVector& x) {
    RealVector g(2);
    g << -400.0 * x(0) * (x(1) - x(0) * x(0)) - 2.0 * (1.0 - x(0)), 200.0 * (x(1) - x(0) * x(0));
    return g;
  };
  RealVector x0(2);
  x0 << -1.2, 1.0;
  bool ok = true;
  std::string detail;
  for (auto m : {optim::Method::BFGS, optim::Method::CG}) {
    const auto t = optim::minimize(rosen, x0, optim::OptimizerConfig::defaults(m));
    const double err = (t.final_params - RealVector::Ones(2)).cwiseAbs().maxCoeff();
    ok = ok && err <= 1e-6;
    detail += fmt::format("{}: |x - (1,1)| = {:.2e} in {} iterations; ", optim::to_string(m), err,
                          t.iterations);
  }
  // Finite termination on a strictly convex quadratic with near-exact line searches.
  std::mt19937_64 gen(9);
  std::normal_distribution<double> d;
  const int n = 8;
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(gen);
  const Eigen::MatrixXd a = m * m.transpose() + Eigen::MatrixXd::Identity(n, n);
  RealVector b(n);
  for (auto& x : b) x = d(gen);
  optim::Objective quad;
  quad.dim = n;
  quad.value = [&](const RealVector& x) { return 0.5 * x.dot(a * x) - b.dot(x); };
  quad.gradient = [&](const RealVector& x) -> RealVector { return a * x - b; };
  const RealVector exact = a.ldlt().solve(b);
  for (auto method : {optim::Method::BFGS, optim::Method::CG}) {
    auto cfg = optim::OptimizerConfig::defaults(method);
    cfg.c1 = 1e-10;
    cfg.c2 = 1e-8;
    cfg.f_tol = 0.0;
    const auto t = optim::minimize(quad, RealVector::Zero(n), cfg);
    const double err = (t.final_params - exact).norm();
    ok = ok && t.iterations <= n + 1 && err < 1e-7;
    detail += fmt::format("{} quadratic n={}: {} iterations, error {:.1e}; ",
                          optim::to_string(method), n, t.iterations, err);
  }
  return {ok, detail};
}

Outcome ac10(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / fmt::format("phbench_ac10_{}", ::getpid());
  fs::create_directories(dir);
  const auto sh = [](const std::string& cmd) { return std::system(cmd.c_str()); };
  const std::string problem = (dir / "problem.json").string();
  int rc = sh(fmt::format("\"{}\" generate --qubits 6 --depth 2 --ans-seed 3 --out \"{}\" 2>/dev/null",
                          cli, problem));
  std::string files[2];
  for (int k = 0; k < 2 && rc == 0; ++k) {
    const std::string out = (dir / fmt::format("records{}.csv", k)).string();
    rc = sh(fmt::format("\"{}\" run --problem \"{}\" --optimizer bfgs --r-grid 0,pi/8,3pi/4 "
                        "--trials 4 --seed 42 --threads 2 --out \"{}\" 2>/dev/null",
                        cli, problem, out));
    std::ifstream in(out, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[k] = ss.str();
  }
  fs::remove_all(dir);
  if (rc != 0) return {false, fmt::format("CLI exited with status {}", rc)};
  const bool same = !files[0].empty() && files[0] == files[1];
  return {same, fmt::format("two runs, {} bytes each, {}", files[0].size(),
                            same ? "byte-identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to phbench CLI>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::pair<const char*, std::function<Outcome()>> checks[] = {
      {"AC1 exact-solution certificate", ac1},
      {"AC2 locality", ac2},
      {"AC3 injectivity length", ac3},
      {"AC4 spectrum", ac4},
      {"AC5 MPS/statevector equivalence", ac5},
      {"AC6 gradient correctness", ac6},
      {"AC7 threshold at desk scale", ac7},
      {"AC8 trivial instance", ac8},
      {"AC9 optimizer sanity", ac9},
      {"AC10 determinism", [&] { return ac10(cli); }},
  };
  int failures = 0;
  for (const auto& [name, check] : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << fmt::format("{} {}: {} [{:.1f} s]", o.pass ? "PASS" : "FAIL", name, o.detail,
                             secs)
              << std::endl;
  }
  std::cout << fmt::format("{} of 10 criteria passed", 10 - failures) << std::endl;
  return failures == 0 ? 0 : 1;
}
