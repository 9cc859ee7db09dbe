#include "qsdp/instances.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qsdp/rng.hpp"

namespace qsdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_symmetric_zero_diag(const Eigen::MatrixXd& m, const char* what) {
  require(m.rows() == m.cols(), std::string(what) + " matrix must be square");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    require(m(i, i) == 0.0, std::string(what) + " matrix must have zero diagonal");
    for (Eigen::Index j = 0; j < i; ++j) {
      require(m(i, j) == m(j, i), std::string(what) + " matrix must be symmetric");
      require(m(i, j) >= 0.0, std::string(what) + " matrix must be nonnegative");
    }
  }
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.size();
  Eigen::MatrixXd m(rows, rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != rows)
      throw std::invalid_argument("matrix rows must all have the same length");
    for (std::size_t k = 0; k < rows; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  nlohmann::json j;
  in >> j;
  return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace

void OvrpInstance::validate() const {
  require(n_nodes >= 1, "OVRP needs at least the depot node");
  require(distance.rows() == n_nodes, "distance matrix size must match n_nodes");
  check_symmetric_zero_diag(distance, "distance");
  require(cost_per_dist >= 0 && cost_per_stop >= 0 && cost_fixed >= 0,
          "costs must be nonnegative");
  require(maxstop >= 1, "maxstop must be positive");
  require(n_vehicles >= 1, "n_vehicles must be positive");
  const int needed = (n_customers() + maxstop - 1) / maxstop;
  require(n_vehicles >= needed,
          "n_vehicles too small: need at least ceil(n_customers/maxstop)");
}

void AspInstance::validate() const {
  require(n_materials >= 1, "ASP needs at least one material");
  require(affinity.rows() == n_materials, "affinity matrix size must match n_materials");
  check_symmetric_zero_diag(affinity, "affinity");
  require(!aisle_capacities.empty(), "need at least one aisle");
  long total = 0;
  for (int cap : aisle_capacities) {
    require(cap >= 1, "aisle capacities must be positive");
    total += cap;
  }
  require(total >= n_materials, "total aisle capacity below number of materials");
}

Eigen::MatrixXd jaccard_affinity(const OrderLog& log) {
  const int m = log.n_materials;
  require(m >= 1, "order log needs at least one material");
  Eigen::MatrixXd co = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(m);
  for (const auto& order : log.orders) {
    for (std::size_t a = 0; a < order.size(); ++a) {
      const int ma = order[a];
      require(ma >= 0 && ma < m, "order references unknown material");
      delta(ma) += 1.0;
      for (std::size_t b = a + 1; b < order.size(); ++b) {
        co(ma, order[b]) += 1.0;
        co(order[b], ma) += 1.0;
      }
    }
  }
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double denom = delta(i) + delta(j) - co(i, j);
      if (denom <= 0.0) {
        std::ostringstream os;
        os << "degenerate material pair (" << i << ", " << j
           << "): delta_" << i << " + delta_" << j << " = O_" << i << j;
        throw std::invalid_argument(os.str());
      }
      sigma(i, j) = co(i, j) / denom;
      sigma(j, i) = sigma(i, j);
    }
  }
  return sigma;
}

double evaluate_ovrp(const OvrpInstance& inst, const RouteSolution& sol) {
  inst.validate();
  const int n = inst.n_customers();
  std::vector<int> visits(n + 1, 0);
  for (const auto& route : sol.routes) {
    if (static_cast<int>(route.size()) > inst.maxstop) {
      std::ostringstream os;
      os << "route of length " << route.size() << " exceeds maxstop " << inst.maxstop;
      throw std::invalid_argument(os.str());
    }
    for (int c : route) {
      require(c >= 1 && c <= n, "route references unknown customer");
      visits[c] += 1;
    }
  }
  std::vector<int> missed, repeated;
  for (int c = 1; c <= n; ++c) {
    if (visits[c] == 0) missed.push_back(c);
    if (visits[c] > 1) repeated.push_back(c);
  }
  if (!missed.empty() || !repeated.empty()) {
    std::ostringstream os;
    os << "invalid route solution;";
    if (!missed.empty()) {
      os << " missed customers:";
      for (int c : missed) os << " " << c;
      os << ";";
    }
    if (!repeated.empty()) {
      os << " repeated customers:";
      for (int c : repeated) os << " " << c;
    }
    throw std::invalid_argument(os.str());
  }
  int nonempty = 0;
  for (const auto& route : sol.routes)
    if (!route.empty()) ++nonempty;
  require(nonempty <= inst.n_vehicles, "more nonempty routes than vehicles");

  double cost = 0.0;
  for (const auto& route : sol.routes) {
    if (route.empty()) continue;
    cost += inst.cost_fixed;
    cost += inst.cost_per_stop * static_cast<double>(route.size());
    cost += inst.cost_per_dist * inst.distance(0, route.front());
    for (std::size_t i = 0; i + 1 < route.size(); ++i)
      cost += inst.cost_per_dist * inst.distance(route[i], route[i + 1]);
  }
  return cost;
}

double evaluate_asp(const AspInstance& inst, const SlottingSolution& sol) {
  inst.validate();
  const int m = inst.n_materials;
  const int k = inst.n_aisles();
  require(static_cast<int>(sol.assignment.size()) == m,
          "assignment must cover every material");
  std::vector<int> occupancy(k, 0);
  for (int a : sol.assignment) {
    require(a >= 0 && a < k, "assignment references unknown aisle");
    occupancy[a] += 1;
  }
  for (int j = 0; j < k; ++j) {
    if (occupancy[j] > inst.aisle_capacities[j]) {
      std::ostringstream os;
      os << "aisle capacity violated;";
      for (int a = 0; a < k; ++a)
        os << " aisle " << a << ": " << occupancy[a] << "/" << inst.aisle_capacities[a];
      throw std::invalid_argument(os.str());
    }
  }
  double total = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && sol.assignment[a] != sol.assignment[b])
        total += inst.affinity(a, b);
  return total;
}

OrderLog generate_order_log(std::uint64_t seed, int n_materials) {
  require(n_materials >= 1, "need at least one material");
  SplitMix64 rng(derive_seed(seed, 0x0bde));
  OrderLog log;
  log.n_materials = n_materials;
  const int n_orders = 3 * n_materials;
  const int max_size = std::min<int>(n_materials, 6);
  for (int o = 0; o < n_orders; ++o) {
    const int size = 1 + static_cast<int>(rng.next_below(max_size));
    std::set<int> picked;
    while (static_cast<int>(picked.size()) < size)
      picked.insert(static_cast<int>(rng.next_below(n_materials)));
    log.orders.emplace_back(picked.begin(), picked.end());
  }
  // materials that never appear would make the affinity quotient degenerate
  std::vector<bool> seen(n_materials, false);
  for (const auto& order : log.orders)
    for (int c : order) seen[c] = true;
  for (int c = 0; c < n_materials; ++c)
    if (!seen[c]) log.orders.push_back({c});
  return log;
}

AspInstance generate_asp(std::uint64_t seed, int n_materials, int n_aisles) {
  require(n_aisles >= 1, "need at least one aisle");
  require(n_materials % n_aisles == 0,
          "equal aisle split requires n_aisles to divide n_materials; "
          "pass explicit capacities otherwise");
  std::vector<int> caps(n_aisles, n_materials / n_aisles);
  return generate_asp(seed, n_materials, std::move(caps));
}

AspInstance generate_asp(std::uint64_t seed, int n_materials,
                         std::vector<int> aisle_capacities) {
  AspInstance inst;
  inst.n_materials = n_materials;
  inst.affinity = jaccard_affinity(generate_order_log(seed, n_materials));
  inst.aisle_capacities = std::move(aisle_capacities);
  inst.validate();
  return inst;
}

OvrpInstance generate_ovrp(std::uint64_t seed, int n_customers, int maxstop) {
  require(n_customers >= 1, "need at least one customer");
  require(maxstop >= 1, "maxstop must be positive");
  SplitMix64 rng(derive_seed(seed, 0x07a9));
  OvrpInstance inst;
  inst.n_nodes = n_customers + 1;
  inst.distance = Eigen::MatrixXd::Zero(inst.n_nodes, inst.n_nodes);
  for (int i = 0; i < inst.n_nodes; ++i)
    for (int j = 0; j < i; ++j) {
      const double d = 1.0 + 99.0 * rng.next_double();
      inst.distance(i, j) = d;
      inst.distance(j, i) = d;
    }
  inst.cost_per_dist = 1.0;
  inst.cost_per_stop = 5.0;
  inst.cost_fixed = 20.0;
  inst.maxstop = maxstop;
  inst.n_vehicles = (n_customers + maxstop - 1) / maxstop;
  inst.validate();
  return inst;
}

void save_ovrp(const OvrpInstance& inst, const std::string& path) {
  inst.validate();
  nlohmann::json j;
  j["distance"] = matrix_to_json(inst.distance);
  j["cost_per_dist"] = inst.cost_per_dist;
  j["cost_per_stop"] = inst.cost_per_stop;
  j["cost_fixed"] = inst.cost_fixed;
  j["maxstop"] = inst.maxstop;
  j["n_vehicles"] = inst.n_vehicles;
  write_json_file(j, path);
}

void save_asp(const AspInstance& inst, const std::string& path) {
  inst.validate();
  nlohmann::json j;
  j["affinity"] = matrix_to_json(inst.affinity);
  j["aisle_capacities"] = inst.aisle_capacities;
  write_json_file(j, path);
}

OvrpInstance load_ovrp(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  OvrpInstance inst;
  inst.distance = matrix_from_json(j.at("distance"));
  inst.n_nodes = static_cast<int>(inst.distance.rows());
  inst.cost_per_dist = j.at("cost_per_dist").get<double>();
  inst.cost_per_stop = j.at("cost_per_stop").get<double>();
  inst.cost_fixed = j.at("cost_fixed").get<double>();
  inst.maxstop = j.at("maxstop").get<int>();
  inst.n_vehicles = j.at("n_vehicles").get<int>();
  inst.validate();
  return inst;
}

AspInstance load_asp(const std::string& path) {
  const nlohmann::json j = read_json_file(path);
  AspInstance inst;
  inst.affinity = matrix_from_json(j.at("affinity"));
  inst.n_materials = static_cast<int>(inst.affinity.rows());
  inst.aisle_capacities = j.at("aisle_capacities").get<std::vector<int>>();
  inst.validate();
  return inst;
}

bool is_asp_file(const std::string& path) {
  return read_json_file(path).contains("affinity");
}

}  // namespace qsdp
