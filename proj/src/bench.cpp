#include "qsdp/bench.hpp"

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qsdp/hu.hpp"
#include "qsdp/lasserre.hpp"
#include "qsdp/reformulate.hpp"
#include "qsdp/rng.hpp"
#include "qsdp/rounding.hpp"

namespace qsdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

struct ResolvedInstance {
  bool is_asp = false;
  AspInstance asp;
  OvrpInstance ovrp;
};

ResolvedInstance resolve_instance(const InstanceSpec& spec) {
  ResolvedInstance out;
  switch (spec.kind) {
    case InstanceSpec::Kind::file:
      if (is_asp_file(spec.path)) {
        out.is_asp = true;
        out.asp = load_asp(spec.path);
      } else {
        out.ovrp = load_ovrp(spec.path);
      }
      break;
    case InstanceSpec::Kind::asp_generator:
      out.is_asp = true;
      out.asp = generate_asp(spec.seed, spec.n_materials, spec.n_aisles);
      break;
    case InstanceSpec::Kind::ovrp_generator:
      out.ovrp = generate_ovrp(spec.seed, spec.n_customers, spec.maxstop);
      break;
  }
  return out;
}

std::optional<double> oracle_optimum(const ResolvedInstance& inst,
                                     const RunConfig& config) {
  try {
    if (inst.is_asp) return brute_asp(inst.asp, config.oracle_asp_cap).value;
    return brute_ovrp(inst.ovrp, config.oracle_ovrp_cap).value;
  } catch (const std::invalid_argument&) {
    return std::nullopt;  // above the enumeration caps
  }
}

}  // namespace

std::string InstanceSpec::label() const {
  if (!name.empty()) return name;
  switch (kind) {
    case Kind::file:
      return std::filesystem::path(path).stem().string();
    case Kind::asp_generator: {
      std::ostringstream os;
      os << "asp-m" << n_materials << "-a" << n_aisles << "-s" << seed;
      return os.str();
    }
    case Kind::ovrp_generator: {
      std::ostringstream os;
      os << "ovrp-c" << n_customers << "-m" << maxstop << "-s" << seed;
      return os.str();
    }
  }
  return "instance";
}

void RunConfig::validate() const {
  require(!instances.empty(), "config needs at least one instance");
  require(!penalties.empty(), "config needs at least one penalty");
  require(!epsilons.empty(), "config needs at least one epsilon");
  for (double p : penalties) require(p > 0.0, "penalties must be positive");
  for (double e : epsilons) require(e > 0.0 && e < 1.0, "epsilons must lie in (0,1)");
  require(rounding_samples >= 1, "need at least one rounding sample");
  // zero is allowed and makes every task time out immediately
  require(time_limit_seconds >= 0.0, "time limit must be nonnegative");
  require(workers >= 1, "need at least one worker");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  RunConfig config;
  for (const auto& item : j.at("instances")) {
    InstanceSpec spec;
    if (item.contains("path")) {
      spec.kind = InstanceSpec::Kind::file;
      spec.path = item.at("path").get<std::string>();
    } else {
      const std::string kind = item.at("kind").get<std::string>();
      if (kind == "asp") {
        spec.kind = InstanceSpec::Kind::asp_generator;
        spec.n_materials = item.at("n_materials").get<int>();
        spec.n_aisles = item.at("n_aisles").get<int>();
      } else if (kind == "ovrp") {
        spec.kind = InstanceSpec::Kind::ovrp_generator;
        spec.n_customers = item.at("n_customers").get<int>();
        spec.maxstop = item.value("maxstop", 3);
      } else {
        throw std::invalid_argument("unknown instance kind: " + kind);
      }
      spec.seed = item.value("seed", 0ULL);
    }
    if (item.contains("name")) spec.name = item.at("name").get<std::string>();
    config.instances.push_back(std::move(spec));
  }
  config.penalties = j.at("penalties").get<std::vector<double>>();
  config.epsilons = j.at("epsilons").get<std::vector<double>>();
  config.rounding_samples = j.value("rounding_samples", config.rounding_samples);
  config.time_limit_seconds = j.value("time_limit_seconds", config.time_limit_seconds);
  config.workers = j.value("workers", config.workers);
  config.out_dir = j.value("out_dir", config.out_dir);
  config.seed = j.value("seed", config.seed);
  config.presolve = j.value("presolve", config.presolve);
  config.record_wall_time = j.value("record_wall_time", config.record_wall_time);
  config.bisection_tolerance = j.value("bisection_tolerance", config.bisection_tolerance);
  config.oracle_qubo_cap = j.value("oracle_qubo_cap", config.oracle_qubo_cap);
  config.oracle_asp_cap = j.value("oracle_asp_cap", config.oracle_asp_cap);
  config.oracle_ovrp_cap = j.value("oracle_ovrp_cap", config.oracle_ovrp_cap);
  config.order2_max_dimension = j.value("order2_max_dimension", config.order2_max_dimension);
  config.validate();
  return config;
}

ResultTable run_pipeline(const RunConfig& config) {
  config.validate();

  // one resolution + oracle run per instance, shared by every grid cell;
  // broken instances taint their cells, never the grid
  std::vector<std::optional<ResolvedInstance>> resolved(config.instances.size());
  std::vector<std::string> resolve_errors(config.instances.size());
  std::vector<std::optional<double>> optima(config.instances.size());
  for (std::size_t i = 0; i < config.instances.size(); ++i) {
    try {
      resolved[i] = resolve_instance(config.instances[i]);
      optima[i] = oracle_optimum(*resolved[i], config);
    } catch (const std::exception& e) {
      resolve_errors[i] = e.what();
    }
  }

  const int n_cells = static_cast<int>(config.instances.size() *
                                       config.penalties.size() * config.epsilons.size());
  ResultTable table;
  table.rows.assign(n_cells, ResultRow{});

  const int per_instance = static_cast<int>(config.penalties.size() * config.epsilons.size());
#pragma omp parallel for schedule(dynamic) num_threads(config.workers)
  for (int cell = 0; cell < n_cells; ++cell) {
    const int inst_idx = cell / per_instance;
    const int within = cell % per_instance;
    const int pen_idx = within / static_cast<int>(config.epsilons.size());
    const int eps_idx = within % static_cast<int>(config.epsilons.size());

    ResultRow row;
    row.instance = config.instances[inst_idx].label();
    row.penalty = config.penalties[pen_idx];
    row.epsilon = config.epsilons[eps_idx];
    row.seed = derive_seed(config.seed, static_cast<std::uint64_t>(cell));
    row.z_star = optima[inst_idx];
    try {
      if (!resolved[inst_idx])
        throw std::runtime_error(resolve_errors[inst_idx]);
      const ResolvedInstance& inst = *resolved[inst_idx];
      const QuadraticModel model = inst.is_asp
                                       ? build_asp_model(inst.asp, config.presolve)
                                       : build_ovrp_model(inst.ovrp);
      PenaltyChoice penalty;
      penalty.lambda = row.penalty;
      const QuboProblem qubo = to_qubo(model, penalty);
      const IsingProblem ising = orient_for_maximization(qubo_to_ising(qubo));

      HuConfig hu_config;
      hu_config.epsilon = row.epsilon;
      hu_config.seed = row.seed;
      hu_config.rounding_samples = config.rounding_samples;
      hu_config.time_limit_seconds = config.time_limit_seconds;
      hu_config.bisection_tolerance = config.bisection_tolerance;

      const HuResult hu = hu_solve(ising.c, hu_config);
      const OriginalBounds bounds = bounds_to_original(hu, ising, qubo, model);

      row.lower = bounds.report.lower_bound;
      row.upper = bounds.report.upper_bound;
      row.feasible_at_model = bounds.report.feasible_at_model;
      row.t_seconds = hu.wall_time_seconds;
      row.t_quantum_seconds = hu.gate_estimate.seconds;
      if (row.z_star) {
        const BoundReport m = metrics(*row.z_star, *row.lower, row.upper);
        row.delta_abs_l = m.delta_abs_lower;
        row.delta_rel_l = m.delta_rel_lower;
        row.delta_abs_u = m.delta_abs_upper;
        row.delta_rel_u = m.delta_rel_upper;
      }
    } catch (const HuTimeout& t) {
      row.status = "timeout";
      row.t_seconds = t.elapsed_seconds;
    } catch (const std::exception& e) {
      row.status = "error";
      row.error = e.what();
    }
    if (!config.record_wall_time) row.t_seconds = 0.0;
    table.rows[cell] = std::move(row);
  }
  return table;
}

void write_results_csv(const ResultTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write results CSV: " + path);
  out << "instance,penalty,epsilon,method,z_star,lower,upper,delta_abs_l,"
         "delta_rel_l,delta_abs_u,delta_rel_u,t_seconds,t_quantum_seconds,"
         "status,seed\n";
  for (const auto& r : table.rows) {
    out << r.instance << "," << fmt_double(r.penalty) << "," << fmt_double(r.epsilon)
        << "," << r.method << "," << fmt_opt(r.z_star) << "," << fmt_opt(r.lower)
        << "," << fmt_opt(r.upper) << "," << fmt_opt(r.delta_abs_l) << ","
        << fmt_opt(r.delta_rel_l) << "," << fmt_opt(r.delta_abs_u) << ","
        << fmt_opt(r.delta_rel_u) << "," << fmt_double(r.t_seconds) << ","
        << fmt_double(r.t_quantum_seconds) << "," << r.status << "," << r.seed
        << "\n";
  }
}

void write_results_json(const ResultTable& table, const std::string& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json j;
    j["instance"] = r.instance;
    j["penalty"] = r.penalty;
    j["epsilon"] = r.epsilon;
    j["method"] = r.method;
    if (r.z_star) j["z_star"] = *r.z_star;
    if (r.lower) j["lower"] = *r.lower;
    if (r.upper) j["upper"] = *r.upper;
    if (r.delta_abs_l) j["delta_abs_l"] = *r.delta_abs_l;
    if (r.delta_rel_l) j["delta_rel_l"] = *r.delta_rel_l;
    if (r.delta_abs_u) j["delta_abs_u"] = *r.delta_abs_u;
    if (r.delta_rel_u) j["delta_rel_u"] = *r.delta_rel_u;
    j["t_seconds"] = r.t_seconds;
    j["t_quantum_seconds"] = r.t_quantum_seconds;
    j["status"] = r.status;
    j["seed"] = r.seed;
    if (r.feasible_at_model) j["feasible_at_model"] = *r.feasible_at_model;
    if (!r.error.empty()) j["error"] = r.error;
    rows.push_back(std::move(j));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write results JSON: " + path);
  out << rows.dump(2) << "\n";
}

ResultTable read_results_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results CSV: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty results CSV");
  ResultTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    require(fields.size() == 15, "results CSV row with unexpected field count");
    auto num = [](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return std::stod(s);
    };
    ResultRow row;
    row.instance = fields[0];
    row.penalty = std::stod(fields[1]);
    row.epsilon = std::stod(fields[2]);
    row.method = fields[3];
    row.z_star = num(fields[4]);
    row.lower = num(fields[5]);
    row.upper = num(fields[6]);
    row.delta_abs_l = num(fields[7]);
    row.delta_rel_l = num(fields[8]);
    row.delta_abs_u = num(fields[9]);
    row.delta_rel_u = num(fields[10]);
    row.t_seconds = std::stod(fields[11]);
    row.t_quantum_seconds = std::stod(fields[12]);
    row.status = fields[13];
    row.seed = std::stoull(fields[14]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

EmitReport emit_sdps(const RunConfig& config) {
  config.validate();
  std::filesystem::create_directories(config.out_dir);
  EmitReport report;
  for (const auto& spec : config.instances) {
    const ResolvedInstance inst = resolve_instance(spec);
    for (double penalty : config.penalties) {
      const QuadraticModel model = inst.is_asp
                                       ? build_asp_model(inst.asp, config.presolve)
                                       : build_ovrp_model(inst.ovrp);
      PenaltyChoice choice;
      choice.lambda = penalty;
      const QuboProblem qubo = to_qubo(model, choice);
      const IsingProblem ising = orient_for_maximization(qubo_to_ising(qubo));
      std::ostringstream base;
      char pen[32];
      std::snprintf(pen, sizeof pen, "%g", penalty);
      base << config.out_dir << "/" << spec.label() << "-p" << pen;
      const std::string order1 = base.str() + ".order1.dat-s";
      emit_sdpa(first_order_sdp(ising), order1);
      report.written.push_back(order1);
      try {
        const MomentSdp second = second_order_sdp(ising, config.order2_max_dimension);
        const std::string order2 = base.str() + ".order2.dat-s";
        emit_sdpa(second, order2);
        report.written.push_back(order2);
      } catch (const std::invalid_argument& e) {
        report.refused.push_back(base.str() + ": " + e.what());
      }
    }
  }
  return report;
}

void plot_data(const ResultTable& table, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);

  struct GapAgg {
    double sum = 0.0;
    long used = 0;
    long no_optimum = 0;
  };
  std::map<std::pair<double, std::string>, GapAgg> gaps;
  for (const auto& r : table.rows) {
    if (r.status != "ok") continue;
    for (const auto& [tag, rel] :
         {std::make_pair(std::string("hu-lower"), r.delta_rel_l),
          std::make_pair(std::string("hu-upper"), r.delta_rel_u)}) {
      auto& agg = gaps[{r.penalty, tag}];
      if (r.z_star && rel) {
        agg.sum += *rel;
        agg.used += 1;
      } else {
        agg.no_optimum += 1;
      }
    }
  }
  {
    std::ofstream out(out_dir + "/delta_vs_penalty.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot CSV");
    out << "penalty,method,mean_delta_rel,rows,no_optimum\n";
    for (const auto& [key, agg] : gaps) {
      out << fmt_double(key.first) << "," << key.second << ",";
      if (agg.used > 0) out << fmt_double(agg.sum / static_cast<double>(agg.used));
      out << "," << agg.used << "," << agg.no_optimum << "\n";
    }
  }
  {
    double t_sum = 0.0, tq_sum = 0.0;
    long n_ok = 0;
    for (const auto& r : table.rows) {
      if (r.status != "ok") continue;
      t_sum += r.t_seconds;
      tq_sum += r.t_quantum_seconds;
      ++n_ok;
    }
    std::ofstream out(out_dir + "/runtime_by_method.csv", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write plot CSV");
    out << "method,mean_t_seconds,rows\n";
    if (n_ok > 0) {
      out << "hu," << fmt_double(t_sum / static_cast<double>(n_ok)) << "," << n_ok << "\n";
      out << "hu-quantum-model," << fmt_double(tq_sum / static_cast<double>(n_ok)) << ","
          << n_ok << "\n";
    }
  }
}

}  // namespace qsdp
