// phbench: generate parent-Hamiltonian benchmark instances, inspect them, run
// seeded VQE sweeps and summarise the results.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "phbench/bench.hpp"
#include "phbench/mps.hpp"
#include "phbench/parent.hpp"

namespace {

using namespace phbench;
using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", path, e.what()));
  }
}

// Writes through a temporary string so a failing computation never leaves a
// half-written file behind.
void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path));
  out << text;
  if (!out) throw std::runtime_error(fmt::format("write to {} failed", path));
}

std::vector<int> parse_int_list(const std::string& text, bool even_only) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    const auto dots = token.find("..");
    try {
      if (dots == std::string::npos) {
        out.push_back(std::stoi(token));
      } else {
        const int lo = std::stoi(token.substr(0, dots));
        const int hi = std::stoi(token.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("empty range");
        for (int v = lo; v <= hi; ++v)
          if (!even_only || v % 2 == 0) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw std::invalid_argument(fmt::format("cannot parse '{}' as an integer or range", token));
    }
  }
  if (out.empty()) throw std::invalid_argument(fmt::format("'{}' selects nothing", text));
  return out;
}

// Optional JSON file with any subset of the OptimizerConfig fields.
void apply_optimizer_config(const json& j, optim::OptimizerConfig& cfg) {
  if (j.contains("method")) cfg = optim::OptimizerConfig::defaults(
                                optim::method_from_string(j.at("method").get<std::string>()));
  cfg.grad_tol = j.value("grad_tol", cfg.grad_tol);
  cfg.f_tol = j.value("f_tol", cfg.f_tol);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.c1 = j.value("c1", cfg.c1);
  cfg.c2 = j.value("c2", cfg.c2);
  cfg.max_line_search_evals = j.value("max_line_search_evals", cfg.max_line_search_evals);
  cfg.simplex_step = j.value("simplex_step", cfg.simplex_step);
}

struct GenerateArgs {
  int qubits = 12;
  int depth = 3;
  std::uint64_t ans_seed = 1;
  double kernel_tol = linalg::kDefaultKernelTol;
  bool pauli = false;
  std::string out;
};

void cmd_generate(const GenerateArgs& a) {
  const AnsatzSpec spec{a.qubits, a.depth};
  spec.validate();
  const ParamVector theta = bench::sample_theta_ans(a.ans_seed, spec.num_params());
  const ParentHamiltonian h = build_parent_hamiltonian(spec, theta, a.kernel_tol);
  write_text(a.out, hamiltonian_to_json(h, a.pauli).dump(1) + "\n");
  std::cerr << fmt::format("N={} depth={} span={} kernel_dim={}\n", a.qubits, a.depth,
                           h.terms().front().span, h.terms().front().kernel_dim);
}

struct InspectArgs {
  std::string problem;
  bool spectrum = false;
  bool pauli = false;
  bool injectivity = false;
  bool dump_mps = false;
  bool gates = false;
  int levels = 0;
};

const Provenance& require_provenance(const ParentHamiltonian& h, const char* flag) {
  if (!h.provenance())
    throw std::runtime_error(fmt::format("{} needs the answer parameters in the problem file", flag));
  return *h.provenance();
}

void cmd_inspect(const InspectArgs& a) {
  const ParentHamiltonian h = hamiltonian_from_json(read_json(a.problem));
  std::cout << fmt::format("num_qubits {}\n", h.num_qubits());
  if (const auto& prov = h.provenance())
    std::cout << fmt::format("depth {}\nkernel_tol {}\n", prov->spec.depth, prov->kernel_tol);
  std::cout << fmt::format("terms {}\n", h.terms().size());
  const LocalTerm& first = h.terms().front();
  std::cout << fmt::format("span {}\nkernel_dim {}\n", first.span, first.kernel_dim);

  if (a.spectrum) {
    const RealVector ev = exact_spectrum(h);
    const Eigen::Index shown = a.levels > 0 ? std::min<Eigen::Index>(a.levels, ev.size())
                                            : ev.size();
    std::cout << "spectrum\n";
    for (Eigen::Index k = 0; k < shown; ++k) std::cout << bench::format_double(ev(k)) << '\n';
  }
  if (a.pauli) {
    for (int parity = 0; parity < std::min(2, h.num_qubits()); ++parity) {
      const LocalTerm& t = h.terms()[parity];
      const auto table = pauli_decomposition(t.matrix);
      std::cout << fmt::format("pauli anchor {} ({} strings)\n", t.anchor, table.size());
      for (const PauliTerm& p : table)
        std::cout << fmt::format("{} {}\n", p.label, bench::format_double(p.coefficient));
    }
  }
  if (a.injectivity) {
    const Provenance& prov = require_provenance(h, "--injectivity");
    const PeriodicMPS mps = ansatz_to_mps(prov.spec, prov.theta_ans);
    const auto len = injectivity_length(mps, kMaxInjectivityLength);
    std::cout << "injectivity_length "
              << (len ? std::to_string(*len) : fmt::format("> {}", kMaxInjectivityLength))
              << '\n';
  }
  if (a.dump_mps) {
    const Provenance& prov = require_provenance(h, "--dump-mps");
    std::cout << mps_to_json(ansatz_to_mps(prov.spec, prov.theta_ans)).dump(1) << '\n';
  }
  if (a.gates) {
    const Provenance& prov = require_provenance(h, "--gates");
    std::cout << gates_to_json(build_ansatz(prov.spec)).dump(1) << '\n';
  }
}

struct RunArgs {
  std::string problem;
  std::string optimizer = "bfgs";
  std::string r_grid;
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string config;
  std::string out;
  std::string summary;
};

void cmd_run(const RunArgs& a) {
  const ParentHamiltonian h = hamiltonian_from_json(read_json(a.problem));
  const Provenance& prov = require_provenance(h, "run");

  bench::ExperimentConfig cfg;
  cfg.num_qubits = prov.spec.num_qubits;
  cfg.depth = prov.spec.depth;
  cfg.kernel_tol = prov.kernel_tol;
  cfg.optimizer = optim::OptimizerConfig::defaults(optim::method_from_string(a.optimizer));
  if (!a.config.empty()) apply_optimizer_config(read_json(a.config), cfg.optimizer);
  cfg.r_grid = a.r_grid.empty() ? bench::default_r_grid() : bench::parse_r_grid(a.r_grid);
  cfg.trials_per_r = a.trials;
  cfg.master_seed = a.seed;
  cfg.threads = a.threads;

  const bench::SweepResult result = bench::run_sweep(cfg, h);
  std::ostringstream records;
  bench::write_records_csv(records, result.records);
  write_text(a.out, records.str());
  if (!a.summary.empty()) {
    std::ostringstream summary;
    bench::write_summary_csv(summary, result.summary);
    write_text(a.summary, summary.str());
  }
  for (const bench::SummaryRow& row : result.summary) {
    std::cerr << fmt::format("r={:.6f} success={:.3f} mean={:.3e}\n", row.r, row.success_rate,
                             row.mean_energy);
  }
}

void cmd_report(const std::string& records_path, const std::string& out) {
  std::ifstream in(records_path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", records_path));
  const auto records = bench::read_records_csv(in);
  if (records.empty()) throw std::runtime_error("no records");
  std::ostringstream summary;
  bench::write_summary_csv(summary, bench::summarize(records));
  write_text(out, summary.str());
}

struct LocalityArgs {
  std::string depths = "3";
  std::string qubits = "8..14";
  int samples = 20;
  std::uint64_t seed = 1;
  double kernel_tol = linalg::kDefaultKernelTol;
  std::string out;
};

void cmd_locality(const LocalityArgs& a) {
  const auto rows = bench::locality_scan(parse_int_list(a.depths, false),
                                         parse_int_list(a.qubits, true), a.samples, a.seed,
                                         a.kernel_tol);
  std::ostringstream text;
  bench::write_locality_csv(text, rows);
  write_text(a.out, text.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parent-Hamiltonian VQE benchmark"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Build and serialize a benchmark instance");
  generate->add_option("--qubits", gen.qubits, "Number of qubits (even, >= 4)")->capture_default_str();
  generate->add_option("--depth", gen.depth, "Ansatz depth")->capture_default_str();
  generate->add_option("--ans-seed", gen.ans_seed, "Seed for the answer parameters")->capture_default_str();
  generate->add_option("--kernel-tol", gen.kernel_tol, "Relative kernel threshold")->capture_default_str();
  generate->add_flag("--pauli", gen.pauli, "Include Pauli decompositions of the terms");
  generate->add_option("--out", gen.out, "Output JSON (stdout if omitted)");

  InspectArgs ins;
  auto* inspect = app.add_subcommand("inspect", "Describe a problem file");
  inspect->add_option("problem", ins.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  inspect->add_flag("--spectrum", ins.spectrum, "Exact spectrum by dense diagonalization");
  inspect->add_option("--levels", ins.levels, "Print only the lowest k eigenvalues");
  inspect->add_flag("--pauli", ins.pauli, "Pauli table of the two sublattice terms");
  inspect->add_flag("--injectivity", ins.injectivity, "Injectivity length of the answer MPS");
  inspect->add_flag("--dump-mps", ins.dump_mps, "Answer state as JSON site tensors");
  inspect->add_flag("--gates", ins.gates, "Ansatz gate list as JSON");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run seeded optimizer trials");
  run_cmd->add_option("--problem", run.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--optimizer", run.optimizer, "bfgs, cg or nelder-mead")->capture_default_str();
  run_cmd->add_option("--r-grid", run.r_grid, "Comma list of distances, e.g. 0,pi/8,3pi/4 (default 13 points on [0, pi])");
  run_cmd->add_option("--trials", run.trials, "Trials per r")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
  run_cmd->add_option("--threads", run.threads, "Worker threads (0: all cores)")->capture_default_str();
  run_cmd->add_option("--config", run.config, "JSON with optimizer settings")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "records.csv (stdout if omitted)");
  run_cmd->add_option("--summary", run.summary, "Also write summary.csv");

  std::string records_path, report_out;
  auto* report = app.add_subcommand(
      "report", "Summarise records.csv; p05/p95 are the empirical 5th/95th percentiles");
  report->add_option("records", records_path, "records.csv")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "summary.csv (stdout if omitted)");

  LocalityArgs loc;
  auto* locality = app.add_subcommand("locality-scan", "Minimal kernel support over random instances");
  locality->add_option("--depth", loc.depths, "Depth or comma list of depths")->capture_default_str();
  locality->add_option("--qubits", loc.qubits, "Range lo..hi (even values) or comma list")->capture_default_str();
  locality->add_option("--samples", loc.samples, "Random instances per (depth, N)")->capture_default_str();
  locality->add_option("--seed", loc.seed, "Master seed")->capture_default_str();
  locality->add_option("--kernel-tol", loc.kernel_tol, "Relative kernel threshold")->capture_default_str();
  locality->add_option("--out", loc.out, "locality.csv (stdout if omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) cmd_generate(gen);
    else if (inspect->parsed()) cmd_inspect(ins);
    else if (run_cmd->parsed()) cmd_run(run);
    else if (report->parsed()) cmd_report(records_path, report_out);
    else if (locality->parsed()) cmd_locality(loc);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
