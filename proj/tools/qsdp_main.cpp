#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qsdp/bench.hpp"
#include "qsdp/encoding.hpp"
#include "qsdp/hu.hpp"
#include "qsdp/instances.hpp"
#include "qsdp/lasserre.hpp"
#include "qsdp/oracle.hpp"
#include "qsdp/reformulate.hpp"
#include "qsdp/rounding.hpp"

namespace {

using namespace qsdp;

struct PipelineArtifacts {
  bool has_model = false;
  QuadraticModel model;
  QuboProblem qubo;
  IsingProblem ising;  // max orientation
  double lambda = 0.0;
  bool lambda_heuristic = false;
};

QuadraticModel build_model_for(const std::string& instance_path, bool presolve) {
  if (is_asp_file(instance_path))
    return build_asp_model(load_asp(instance_path), presolve);
  return build_ovrp_model(load_ovrp(instance_path));
}

PipelineArtifacts compile_input(const std::string& instance_path,
                                const std::string& qubo_path, bool presolve,
                                std::optional<double> penalty, double factor) {
  PipelineArtifacts art;
  if (!instance_path.empty()) {
    art.has_model = true;
    art.model = build_model_for(instance_path, presolve);
    PenaltyChoice choice;
    if (penalty) {
      choice.lambda = *penalty;
      choice.provenance = PenaltyChoice::Provenance::user_supplied;
    } else {
      choice = penalty_heuristic(art.model, factor);
    }
    art.lambda = choice.lambda;
    art.lambda_heuristic = choice.provenance == PenaltyChoice::Provenance::heuristic;
    art.qubo = to_qubo(art.model, choice);
  } else {
    art.qubo = load_qubo(qubo_path);
  }
  art.ising = orient_for_maximization(qubo_to_ising(art.qubo));
  return art;
}

int cmd_generate(const std::string& kind, std::uint64_t seed, int n_materials,
                 int n_aisles, int n_customers, int maxstop,
                 const std::string& out) {
  if (kind == "asp") {
    save_asp(generate_asp(seed, n_materials, n_aisles), out);
  } else {
    save_ovrp(generate_ovrp(seed, n_customers, maxstop), out);
  }
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_solve(const PipelineArtifacts& art, const HuConfig& hu_config,
              const std::string& out) {
  const HuResult hu = hu_solve(art.ising.c, hu_config);

  nlohmann::json report;
  report["gamma_low"] = hu.gamma_low;
  report["gamma_high"] = hu.gamma_high;
  report["sdp_bound"] = hu.sdp_bound;
  report["rounding_bound"] = hu.rounding_bound;
  report["iterations"] = hu.iterations_total;
  report["wall_time_seconds"] = hu.wall_time_seconds;
  report["quantum_gate_estimate"] = hu.gate_estimate.gate_count;
  report["quantum_seconds_estimate"] = hu.gate_estimate.seconds;

  double lower, upper;
  if (art.has_model) {
    const OriginalBounds bounds = bounds_to_original(hu, art.ising, art.qubo, art.model);
    lower = bounds.report.lower_bound;
    upper = *bounds.report.upper_bound;
    report["feasible_at_model"] = *bounds.report.feasible_at_model;
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : bounds.violations)
      violations.push_back({{"constraint", v.label}, {"residual", v.residual}});
    report["violations"] = violations;
  } else {
    const Eigen::VectorXd bits = ising_solution_to_qubo(hu.rounded_vector);
    lower = -hu.sdp_bound + art.ising.offset_carry;
    upper = art.qubo.value(bits);
  }
  report["lower_bound"] = lower;
  report["upper_bound"] = upper;
  std::cout << "lower bound " << lower << ", upper bound " << upper << " ("
            << hu.iterations_total << " iterations, " << hu.wall_time_seconds
            << " s)\n";
  if (!out.empty()) {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write report: " + out);
    f << report.dump(2) << "\n";
    std::cout << "wrote " << out << "\n";
  }
  return 0;
}

int cmd_brute(const std::string& instance_path, const std::string& qubo_path,
              int cap) {
  if (!instance_path.empty()) {
    if (is_asp_file(instance_path)) {
      const AspInstance inst = load_asp(instance_path);
      const AspBruteResult best = brute_asp(inst);
      std::cout << "optimum " << best.value << "\nassignment:";
      for (int a : best.solution.assignment) std::cout << " " << a;
      std::cout << "\n";
    } else {
      const OvrpInstance inst = load_ovrp(instance_path);
      const OvrpBruteResult best = brute_ovrp(inst);
      std::cout << "optimum " << best.value << "\n";
      for (const auto& route : best.solution.routes) {
        std::cout << "route: depot";
        for (int c : route) std::cout << " -> " << c;
        std::cout << "\n";
      }
    }
  } else {
    const QuboProblem qubo = load_qubo(qubo_path);
    const BruteResult best = brute_qubo(qubo, cap);
    std::cout << "minimum " << best.value << "\nbits:";
    for (Eigen::Index i = 0; i < best.argmin.size(); ++i)
      std::cout << " " << static_cast<int>(best.argmin(i));
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"logistics models -> penalized QUBO -> Ising -> SDP relaxation "
               "bounds via Hamiltonian updates, with moment-SDP export and "
               "brute-force oracles"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "write a synthetic instance file");
  std::string gen_kind = "asp";
  std::uint64_t gen_seed = 0;
  int gen_materials = 30, gen_aisles = 3, gen_customers = 10, gen_maxstop = 3;
  std::string gen_out;
  generate->add_option("--kind", gen_kind, "asp | ovrp")
      ->check(CLI::IsMember({"asp", "ovrp"}));
  generate->add_option("--seed", gen_seed, "generator seed");
  generate->add_option("--n-materials", gen_materials, "ASP: number of materials");
  generate->add_option("--n-aisles", gen_aisles, "ASP: number of aisles");
  generate->add_option("--n-customers", gen_customers, "OVRP: number of customers");
  generate->add_option("--maxstop", gen_maxstop, "OVRP: stops per vehicle");
  generate->add_option("--out", gen_out, "output instance file")->required();

  // compile
  auto* compile = app.add_subcommand("compile", "instance -> penalized QUBO file");
  std::string cmp_instance, cmp_out, cmp_ising_out;
  std::optional<double> cmp_penalty;
  double cmp_factor = 1.0;
  bool cmp_presolve = false;
  compile->add_option("--instance", cmp_instance, "instance JSON file")->required();
  compile->add_option("--penalty", cmp_penalty, "penalization factor (default: heuristic)");
  compile->add_option("--factor", cmp_factor, "heuristic factor in [0.75, 1.5]");
  compile->add_flag("--presolve", cmp_presolve, "drop all-zero-affinity materials");
  compile->add_option("--out", cmp_out, "output QUBO file")->required();
  compile->add_option("--ising-out", cmp_ising_out, "also write the Ising form");

  // solve
  auto* solve = app.add_subcommand("solve", "run the SDP relaxation pipeline");
  std::string sol_instance, sol_qubo, sol_out, sol_telemetry;
  std::optional<double> sol_penalty;
  double sol_epsilon = 1e-2, sol_time_limit = 0.0, sol_tolerance = 1.0;
  int sol_samples = 100;
  std::uint64_t sol_seed = 0;
  bool sol_presolve = false;
  solve->add_option("--instance", sol_instance, "instance JSON file");
  solve->add_option("--qubo", sol_qubo, "QUBO file (alternative input)");
  solve->add_option("--penalty", sol_penalty, "penalization factor");
  solve->add_option("--epsilon", sol_epsilon, "solver precision");
  solve->add_option("--samples", sol_samples, "rounding samples");
  solve->add_option("--seed", sol_seed, "rounding seed");
  solve->add_option("--time-limit", sol_time_limit, "seconds, 0 = none");
  solve->add_option("--tolerance", sol_tolerance,
                    "bisection tolerance in units of epsilon*n*norm");
  solve->add_flag("--presolve", sol_presolve, "drop all-zero-affinity materials");
  solve->add_option("--out", sol_out, "JSON report path");
  solve->add_option("--telemetry", sol_telemetry, "line-delimited JSON iteration log");

  // emit-sdpa
  auto* emit = app.add_subcommand("emit-sdpa", "write moment relaxations in SDPA format");
  std::string emit_instance, emit_qubo, emit_out;
  std::optional<double> emit_penalty;
  int emit_order = 1;
  bool emit_presolve = false;
  emit->add_option("--instance", emit_instance, "instance JSON file");
  emit->add_option("--qubo", emit_qubo, "QUBO file (alternative input)");
  emit->add_option("--penalty", emit_penalty, "penalization factor");
  emit->add_option("--order", emit_order, "relaxation order")->check(CLI::IsMember({1, 2}));
  emit->add_flag("--presolve", emit_presolve, "drop all-zero-affinity materials");
  emit->add_option("--out", emit_out, "output .dat-s path")->required();

  // brute
  auto* brute = app.add_subcommand("brute", "exact optimum by enumeration");
  std::string brute_instance, brute_qubo_path;
  int brute_cap = 26;
  brute->add_option("--instance", brute_instance, "instance JSON file");
  brute->add_option("--qubo", brute_qubo_path, "QUBO file");
  brute->add_option("--cap", brute_cap, "bit cap for QUBO enumeration");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark grid from a config file");
  std::string bench_config;
  std::optional<std::uint64_t> bench_seed;
  std::optional<int> bench_workers;
  std::optional<double> bench_time_limit;
  std::vector<double> bench_epsilons, bench_penalties;
  std::string bench_out;
  bench->add_option("--config", bench_config, "RunConfig JSON")->required();
  bench->add_option("--seed", bench_seed, "override the global seed");
  bench->add_option("--workers", bench_workers, "override the worker count");
  bench->add_option("--time-limit", bench_time_limit, "override the per-task limit");
  bench->add_option("--epsilon", bench_epsilons, "override the epsilon grid");
  bench->add_option("--penalty", bench_penalties, "override the penalty grid");
  bench->add_option("--out", bench_out, "override the output directory");

  // plot-data
  auto* plot = app.add_subcommand("plot-data", "figure-style CSV series from results");
  std::string plot_results, plot_out = ".";
  plot->add_option("--results", plot_results, "results CSV")->required();
  plot->add_option("--out", plot_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate)
      return cmd_generate(gen_kind, gen_seed, gen_materials, gen_aisles,
                          gen_customers, gen_maxstop, gen_out);

    if (*compile) {
      const PipelineArtifacts art =
          compile_input(cmp_instance, "", cmp_presolve, cmp_penalty, cmp_factor);
      save_qubo(art.qubo, cmp_out);
      std::cout << "wrote " << cmp_out << " (" << art.qubo.size()
                << " variables, penalty " << art.lambda
                << (art.lambda_heuristic ? ", heuristic" : "") << ")\n";
      if (!cmp_ising_out.empty()) {
        save_ising(art.ising, cmp_ising_out);
        std::cout << "wrote " << cmp_ising_out << "\n";
      }
      return 0;
    }

    if (*solve) {
      if (sol_instance.empty() == sol_qubo.empty())
        throw CLI::ValidationError("solve", "pass exactly one of --instance / --qubo");
      const PipelineArtifacts art =
          compile_input(sol_instance, sol_qubo, sol_presolve, sol_penalty, 1.0);
      HuConfig hu_config;
      hu_config.epsilon = sol_epsilon;
      hu_config.seed = sol_seed;
      hu_config.rounding_samples = sol_samples;
      hu_config.bisection_tolerance = sol_tolerance;
      hu_config.telemetry_path = sol_telemetry;
      if (sol_time_limit > 0.0) hu_config.time_limit_seconds = sol_time_limit;
      return cmd_solve(art, hu_config, sol_out);
    }

    if (*emit) {
      if (emit_instance.empty() == emit_qubo.empty())
        throw CLI::ValidationError("emit-sdpa", "pass exactly one of --instance / --qubo");
      const PipelineArtifacts art =
          compile_input(emit_instance, emit_qubo, emit_presolve, emit_penalty, 1.0);
      const MomentSdp sdp = emit_order == 1 ? first_order_sdp(art.ising)
                                            : second_order_sdp(art.ising);
      emit_sdpa(sdp, emit_out);
      std::cout << "wrote " << emit_out << " (dimension " << sdp.dimension << ", "
                << sdp.n_constraints() << " constraints)\n";
      return 0;
    }

    if (*brute) {
      if (brute_instance.empty() == brute_qubo_path.empty())
        throw CLI::ValidationError("brute", "pass exactly one of --instance / --qubo");
      return cmd_brute(brute_instance, brute_qubo_path, brute_cap);
    }

    if (*bench) {
      RunConfig config = load_run_config(bench_config);
      if (bench_seed) config.seed = *bench_seed;
      if (bench_workers) config.workers = *bench_workers;
      if (bench_time_limit) config.time_limit_seconds = *bench_time_limit;
      if (!bench_epsilons.empty()) config.epsilons = bench_epsilons;
      if (!bench_penalties.empty()) config.penalties = bench_penalties;
      if (!bench_out.empty()) config.out_dir = bench_out;
      config.validate();
      std::filesystem::create_directories(config.out_dir);
      const ResultTable table = run_pipeline(config);
      write_results_csv(table, config.out_dir + "/results.csv");
      write_results_json(table, config.out_dir + "/results.json");
      plot_data(table, config.out_dir);
      long ok = 0, timeout = 0, failed = 0;
      for (const auto& r : table.rows) {
        if (r.status == "ok") ++ok;
        if (r.status == "timeout") ++timeout;
        if (r.status == "error") ++failed;
      }
      std::cout << table.rows.size() << " rows (" << ok << " ok, " << timeout
                << " timeout, " << failed << " error) -> " << config.out_dir
                << "/results.csv\n";
      return failed == 0 ? 0 : 1;  // timeouts are expected outcomes, errors are not
    }

    if (*plot) {
      const ResultTable table = read_results_csv(plot_results);
      plot_data(table, plot_out);
      std::cout << "wrote " << plot_out << "/delta_vs_penalty.csv and "
                << plot_out << "/runtime_by_method.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
