// Benchmark harness: instance generation, initial-point sampling at a fixed
// distance from the hidden solution, seeded optimizer sweeps, and CSV reports.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "phbench/optim.hpp"
#include "phbench/parent.hpp"

namespace phbench::bench {

/// Energies below this count as reaching the exact ground state (energy 0).
inline constexpr double kSuccessThreshold = 1e-6;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Per-trial seed: mix64(mix64(mix64(master) ^ r_index) ^ trial_index), with
/// the indices offset so that index 0 still perturbs the state.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t r_index,
                         std::uint64_t trial_index);

/// Small deterministic generator: mt19937_64 words mapped to doubles without
/// relying on the implementation-defined standard distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

ParamVector sample_theta_ans(std::uint64_t seed, int num_params);

/// theta_ans + r * u with u uniform on the unit sphere (normalised Gaussian).
ParamVector sample_initial(const ParamVector& theta_ans, double r, std::uint64_t seed);

struct ExperimentConfig {
  int num_qubits = 12;
  int depth = 3;
  optim::OptimizerConfig optimizer = optim::OptimizerConfig::defaults(optim::Method::BFGS);
  std::vector<double> r_grid;
  int trials_per_r = 100;
  std::uint64_t master_seed = 1;
  std::uint64_t theta_ans_seed = 1;
  double kernel_tol = linalg::kDefaultKernelTol;
  int threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// 13 evenly spaced points on [0, pi].
std::vector<double> default_r_grid();

/// Parses "0,pi/16,3pi/4,0.5" style lists. Tokens are numbers, optionally
/// followed or replaced by "pi" with an optional "/k" divisor.
std::vector<double> parse_r_grid(const std::string& text);

struct TrialRecord {
  double r = 0.0;
  int trial_index = 0;
  std::uint64_t seed = 0;
  ParamVector theta_init;
  double converged_energy = 0.0;
  int iterations = 0;
  int function_evals = 0;
  int gradient_evals = 0;
  optim::Termination termination = optim::Termination::MaxIters;
};

struct SummaryRow {
  double r = 0.0;
  double mean_energy = 0.0;
  double p05 = 0.0;
  double p95 = 0.0;
  double success_rate = 0.0;
};

/// Wraps energy and parameter-shift gradient of the circuit into an optimizer
/// objective.
optim::Objective make_objective(const EnergyEvaluator& evaluator);

/// One optimization from theta_init. The reported energy is recomputed from
/// scratch at the final parameters.
TrialRecord run_trial(const EnergyEvaluator& evaluator, const ParamVector& theta_init,
                      const optim::OptimizerConfig& cfg);
TrialRecord run_trial(const ParentHamiltonian& h, const AnsatzSpec& spec,
                      const ParamVector& theta_init, const optim::OptimizerConfig& cfg);

struct SweepResult {
  std::vector<TrialRecord> records;
  std::vector<SummaryRow> summary;
};

/// Runs every (r, trial) pair of the config against a prepared Hamiltonian.
/// Records come back ordered by (r index, trial index) whatever the thread
/// count.
SweepResult run_sweep(const ExperimentConfig& cfg, const ParentHamiltonian& h);

/// Builds the Hamiltonian from cfg.theta_ans_seed, then sweeps.
SweepResult run_sweep(const ExperimentConfig& cfg);

/// Empirical lower / upper percentile bracketing at least the requested
/// central fraction: positions floor / ceil of q (n - 1) in the sorted data.
double percentile_lower(std::vector<double> values, double q);
double percentile_upper(std::vector<double> values, double q);

/// One row per distinct r, in order of first appearance.
std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);
std::vector<TrialRecord> read_records_csv(std::istream& in);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

struct LocalityRow {
  int num_qubits = 0;
  int depth = 0;
  int samples = 0;
  int min_support = 0;
  double avg_support = 0.0;
  int max_support = 0;
};

/// Minimal kernel support statistics over the given answer parameters.
LocalityRow locality_row(int num_qubits, int depth, const std::vector<ParamVector>& thetas,
                         double kernel_tol = linalg::kDefaultKernelTol);

/// For every (depth, N) pair draws `samples` answer vectors and tabulates
/// their minimal supports.
std::vector<LocalityRow> locality_scan(const std::vector<int>& depths,
                                       const std::vector<int>& qubit_counts, int samples,
                                       std::uint64_t seed,
                                       double kernel_tol = linalg::kDefaultKernelTol);

void write_locality_csv(std::ostream& out, const std::vector<LocalityRow>& rows);

/// "%.17g".
std::string format_double(double v);

}  // namespace phbench::bench
