#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsdp/instances.hpp"
#include "qsdp/oracle.hpp"

namespace qsdp {

// One instance of the grid: either a JSON file on disk or a generator call.
struct InstanceSpec {
  enum class Kind { file, asp_generator, ovrp_generator } kind = Kind::file;
  std::string name;  // row label; derived from path / parameters when empty
  std::string path;
  std::uint64_t seed = 0;
  int n_materials = 0;
  int n_aisles = 0;
  int n_customers = 0;
  int maxstop = 3;

  std::string label() const;
};

struct RunConfig {
  std::vector<InstanceSpec> instances;
  std::vector<double> penalties;  // one QUBO per penalty
  std::vector<double> epsilons;   // one solve per epsilon
  int rounding_samples = 100;
  double time_limit_seconds = 300.0;
  int workers = 1;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  // drop materials with all-zero affinity before compiling ASP models
  bool presolve = false;
  // when false the t_seconds column is written as 0 so that reruns of the
  // same config produce byte-identical CSVs (wall time is the only
  // non-reproducible column)
  bool record_wall_time = true;
  double bisection_tolerance = 1.0;
  // oracle refusal thresholds; cells above them report no z_star
  int oracle_qubo_cap = 26;
  long oracle_asp_cap = 10'000'000;
  int oracle_ovrp_cap = 8;
  int order2_max_dimension = 2048;

  void validate() const;
};

RunConfig load_run_config(const std::string& path);

struct ResultRow {
  std::string instance;
  double penalty = 0.0;
  double epsilon = 0.0;
  std::string method = "hu";
  std::optional<double> z_star;
  std::optional<double> lower, upper;
  std::optional<double> delta_abs_l, delta_rel_l, delta_abs_u, delta_rel_u;
  double t_seconds = 0.0;
  double t_quantum_seconds = 0.0;
  std::string status = "ok";  // ok | timeout | error
  std::uint64_t seed = 0;
  std::optional<bool> feasible_at_model;
  std::string error;  // carried in the JSON output only
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

// Runs build -> QUBO -> Ising -> solve -> bounds -> metrics for every
// instance x penalty x epsilon cell. Cells run on a worker pool; per-cell
// seeds derive from (seed, cell index), so the table does not depend on the
// schedule. Per-cell failures and timeouts become row statuses, never grid
// aborts.
ResultTable run_pipeline(const RunConfig& config);

void write_results_csv(const ResultTable& table, const std::string& path);
void write_results_json(const ResultTable& table, const std::string& path);
ResultTable read_results_csv(const std::string& path);

// order-1 and (size permitting) order-2 SDPA files per instance x penalty
struct EmitReport {
  std::vector<std::string> written;
  std::vector<std::string> refused;  // order-2 size refusals, with reason
};
EmitReport emit_sdps(const RunConfig& config);

// Figure-style series: mean relative gaps per penalty and mean running time
// per method. Rows without a known optimum are excluded from the gap series
// and counted in the no_optimum column.
void plot_data(const ResultTable& table, const std::string& out_dir);

}  // namespace qsdp
