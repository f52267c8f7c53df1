#include "phbench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

namespace phbench::bench {

std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t r_index,
                         std::uint64_t trial_index) {
  return mix64(mix64(mix64(master_seed) ^ (r_index + 1)) ^ (trial_index + 1));
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ParamVector sample_theta_ans(std::uint64_t seed, int num_params) {
  if (num_params < 1) throw std::invalid_argument("sample_theta_ans: num_params must be >= 1");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  Rng rng(seed);
  ParamVector theta(num_params);
  for (int j = 0; j < num_params; ++j) {
    double t = kTwoPi * rng.uniform();
    if (t >= kTwoPi) t = std::nextafter(kTwoPi, 0.0);
    theta(j) = t;
  }
  return theta;
}

ParamVector sample_initial(const ParamVector& theta_ans, double r, std::uint64_t seed) {
  if (!(r >= 0.0)) throw std::invalid_argument(fmt::format("sample_initial: r = {} < 0", r));
  Rng rng(seed);
  RealVector direction(theta_ans.size());
  double norm = 0.0;
  while (!(norm > 0.0)) {
    for (Eigen::Index j = 0; j < direction.size(); ++j) direction(j) = rng.normal();
    norm = direction.norm();
  }
  return theta_ans + (r / norm) * direction;
}

void ExperimentConfig::validate() const {
  AnsatzSpec{num_qubits, depth}.validate();
  optimizer.validate();
  if (r_grid.empty()) throw std::invalid_argument("r grid is empty");
  for (double r : r_grid) {
    if (!(r >= 0.0 && r <= std::numbers::pi + 1e-12))
      throw std::invalid_argument(fmt::format("r = {} outside [0, pi]", r));
  }
  if (trials_per_r < 1) throw std::invalid_argument("trials_per_r must be >= 1");
  if (!(kernel_tol > 0.0)) throw std::invalid_argument("kernel_tol must be positive");
}

std::vector<double> default_r_grid() {
  std::vector<double> grid(13);
  for (int k = 0; k < 13; ++k) grid[k] = std::numbers::pi * k / 12.0;
  return grid;
}

std::vector<double> parse_r_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(),
                               [](unsigned char c) { return std::isspace(c) || c == '*'; }),
                token.end());
    if (token.empty()) continue;
    const auto bad = [&] {
      return std::invalid_argument(fmt::format("cannot parse r value '{}'", token));
    };
    double value = 1.0;
    const std::size_t pi_pos = token.find("pi");
    try {
      if (pi_pos == std::string::npos) {
        std::size_t used = 0;
        value = std::stod(token, &used);
        if (used != token.size()) throw bad();
      } else {
        if (pi_pos > 0) {
          std::size_t used = 0;
          value = std::stod(token.substr(0, pi_pos), &used);
          if (used != pi_pos) throw bad();
        }
        value *= std::numbers::pi;
        const std::string rest = token.substr(pi_pos + 2);
        if (!rest.empty()) {
          if (rest[0] != '/') throw bad();
          std::size_t used = 0;
          const double divisor = std::stod(rest.substr(1), &used);
          if (used != rest.size() - 1 || divisor == 0.0) throw bad();
          value /= divisor;
        }
      }
    } catch (const std::logic_error&) {
      throw bad();
    }
    grid.push_back(value);
  }
  if (grid.empty()) throw std::invalid_argument("r grid is empty");
  return grid;
}

optim::Objective make_objective(const EnergyEvaluator& evaluator) {
  optim::Objective obj;
  obj.value = [&evaluator](const RealVector& theta) { return evaluator.energy(theta); };
  obj.gradient = [&evaluator](const RealVector& theta) {
    return evaluator.gradient_parameter_shift(theta);
  };
  obj.dim = evaluator.num_params();
  return obj;
}

TrialRecord run_trial(const EnergyEvaluator& evaluator, const ParamVector& theta_init,
                      const optim::OptimizerConfig& cfg) {
  const optim::OptimizationTrace trace =
      optim::minimize(make_objective(evaluator), theta_init, cfg);
  TrialRecord rec;
  rec.theta_init = theta_init;
  rec.converged_energy = evaluator.energy(trace.final_params);
  rec.iterations = trace.iterations;
  rec.function_evals = trace.function_evals;
  rec.gradient_evals = trace.gradient_evals;
  rec.termination = trace.termination;
  return rec;
}

TrialRecord run_trial(const ParentHamiltonian& h, const AnsatzSpec& spec,
                      const ParamVector& theta_init, const optim::OptimizerConfig& cfg) {
  const EnergyEvaluator evaluator(build_ansatz(spec), h);
  return run_trial(evaluator, theta_init, cfg);
}

SweepResult run_sweep(const ExperimentConfig& cfg, const ParentHamiltonian& h) {
  cfg.validate();
  const auto& prov = h.provenance();
  if (!prov) throw std::invalid_argument("run_sweep: Hamiltonian carries no answer parameters");
  if (prov->spec != AnsatzSpec{cfg.num_qubits, cfg.depth}) {
    throw std::invalid_argument(fmt::format(
        "run_sweep: Hamiltonian was built for N={}, depth={} but the config asks for N={}, "
        "depth={}",
        prov->spec.num_qubits, prov->spec.depth, cfg.num_qubits, cfg.depth));
  }
  const EnergyEvaluator evaluator(build_ansatz(prov->spec), h);

  const std::size_t per_r = static_cast<std::size_t>(cfg.trials_per_r);
  const std::size_t total = cfg.r_grid.size() * per_r;
  std::vector<TrialRecord> records(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      try {
        const std::size_t r_index = job / per_r;
        const std::size_t trial = job % per_r;
        const double r = cfg.r_grid[r_index];
        const std::uint64_t seed = trial_seed(cfg.master_seed, r_index, trial);
        TrialRecord rec =
            run_trial(evaluator, sample_initial(prov->theta_ans, r, seed), cfg.optimizer);
        rec.r = r;
        rec.trial_index = static_cast<int>(trial);
        rec.seed = seed;
        records[job] = std::move(rec);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.summary = summarize(records);
  result.records = std::move(records);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const AnsatzSpec spec{cfg.num_qubits, cfg.depth};
  const ParamVector theta_ans = sample_theta_ans(cfg.theta_ans_seed, spec.num_params());
  const ParentHamiltonian h = build_parent_hamiltonian(spec, theta_ans, cfg.kernel_tol);
  return run_sweep(cfg, h);
}

namespace {

std::vector<double> sorted(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  return values;
}

}  // namespace

double percentile_lower(std::vector<double> values, double q) {
  const auto v = sorted(std::move(values));
  const double pos = q * static_cast<double>(v.size() - 1);
  return v[static_cast<std::size_t>(std::floor(pos))];
}

double percentile_upper(std::vector<double> values, double q) {
  const auto v = sorted(std::move(values));
  const double pos = q * static_cast<double>(v.size() - 1);
  return v[std::min(v.size() - 1, static_cast<std::size_t>(std::ceil(pos)))];
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  std::vector<double> order;
  for (const TrialRecord& rec : records)
    if (std::find(order.begin(), order.end(), rec.r) == order.end()) order.push_back(rec.r);

  std::vector<SummaryRow> rows;
  for (double r : order) {
    std::vector<double> energies;
    for (const TrialRecord& rec : records)
      if (rec.r == r) energies.push_back(rec.converged_energy);
    SummaryRow row;
    row.r = r;
    double sum = 0.0;
    int successes = 0;
    for (double e : energies) {
      sum += e;
      if (e < kSuccessThreshold) ++successes;
    }
    row.mean_energy = sum / static_cast<double>(energies.size());
    row.p05 = percentile_lower(energies, 0.05);
    row.p95 = percentile_upper(energies, 0.95);
    row.success_rate = static_cast<double>(successes) / static_cast<double>(energies.size());
    rows.push_back(row);
  }
  return rows;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

constexpr const char* kRecordsHeader =
    "r,trial_index,seed,converged_energy,iterations,function_evals,gradient_evals,termination";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const TrialRecord& rec : records) {
    out << fmt::format("{},{},{},{},{},{},{},{}\n", format_double(rec.r), rec.trial_index,
                       rec.seed, format_double(rec.converged_energy), rec.iterations,
                       rec.function_evals, rec.gradient_evals,
                       optim::to_string(rec.termination));
  }
}

std::vector<TrialRecord> read_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("records csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader)
    throw std::runtime_error(fmt::format("unexpected records header '{}'", line));
  std::vector<TrialRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 8)
      throw std::runtime_error(fmt::format("line {}: expected 8 fields, got {}", line_no, f.size()));
    try {
      TrialRecord rec;
      rec.r = std::stod(f[0]);
      rec.trial_index = std::stoi(f[1]);
      rec.seed = std::stoull(f[2]);
      rec.converged_energy = std::stod(f[3]);
      rec.iterations = std::stoi(f[4]);
      rec.function_evals = std::stoi(f[5]);
      rec.gradient_evals = std::stoi(f[6]);
      rec.termination = optim::termination_from_string(f[7]);
      records.push_back(std::move(rec));
    } catch (const std::exception& e) {
      throw std::runtime_error(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "r,mean_energy,p05,p95,success_rate\n";
  for (const SummaryRow& row : rows) {
    out << fmt::format("{},{},{},{},{}\n", format_double(row.r), format_double(row.mean_energy),
                       format_double(row.p05), format_double(row.p95),
                       format_double(row.success_rate));
  }
}

LocalityRow locality_row(int num_qubits, int depth, const std::vector<ParamVector>& thetas,
                         double kernel_tol) {
  if (thetas.empty()) throw std::invalid_argument("locality_row: no samples");
  const AnsatzSpec spec{num_qubits, depth};
  spec.validate();
  LocalityRow row{num_qubits, depth, static_cast<int>(thetas.size()), num_qubits + 1, 0.0, 0};
  double sum = 0.0;
  for (const ParamVector& theta : thetas) {
    const int n = minimal_support(ansatz_to_mps(spec, theta), num_qubits, kernel_tol);
    row.min_support = std::min(row.min_support, n);
    row.max_support = std::max(row.max_support, n);
    sum += n;
  }
  row.avg_support = sum / static_cast<double>(thetas.size());
  return row;
}

std::vector<LocalityRow> locality_scan(const std::vector<int>& depths,
                                       const std::vector<int>& qubit_counts, int samples,
                                       std::uint64_t seed, double kernel_tol) {
  if (samples < 1) throw std::invalid_argument("locality_scan: samples must be >= 1");
  std::vector<LocalityRow> rows;
  for (int depth : depths) {
    for (int n : qubit_counts) {
      std::vector<ParamVector> thetas;
      for (int s = 0; s < samples; ++s) {
        const std::uint64_t key = (static_cast<std::uint64_t>(depth) << 32) |
                                  static_cast<std::uint32_t>(n);
        thetas.push_back(sample_theta_ans(trial_seed(seed, key, s), 2 * depth));
      }
      rows.push_back(locality_row(n, depth, thetas, kernel_tol));
    }
  }
  return rows;
}

void write_locality_csv(std::ostream& out, const std::vector<LocalityRow>& rows) {
  out << "num_qubits,depth,samples,min_support,avg_support,max_support\n";
  for (const LocalityRow& row : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", row.num_qubits, row.depth, row.samples,
                       row.min_support, format_double(row.avg_support), row.max_support);
  }
}

}  // namespace phbench::bench
