#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace qsdp {

// Open vehicle routing instance. Node 0 is the depot, nodes 1..n_nodes-1 are
// customers. The fleet is homogeneous: one cost triple applies to every
// vehicle.
struct OvrpInstance {
  int n_nodes = 0;
  Eigen::MatrixXd distance;  // symmetric, zero diagonal, nonnegative
  double cost_per_dist = 0.0;
  double cost_per_stop = 0.0;
  double cost_fixed = 0.0;
  int maxstop = 1;
  int n_vehicles = 1;

  int n_customers() const { return n_nodes - 1; }
  // throws std::invalid_argument if any structural invariant is broken
  void validate() const;
};

// Slotting instance: materials with a pairwise affinity matrix and a set of
// aisles with per-aisle capacities.
struct AspInstance {
  int n_materials = 0;
  Eigen::MatrixXd affinity;  // symmetric, zero diagonal, nonnegative
  std::vector<int> aisle_capacities;

  int n_aisles() const { return static_cast<int>(aisle_capacities.size()); }
  void validate() const;
};

// A sequence of orders; each order is the set of material indices picked
// together. Used to derive affinities.
struct OrderLog {
  int n_materials = 0;
  std::vector<std::vector<int>> orders;  // each sorted, duplicates removed
};

// Open routes: each route is the ordered customer sequence of one vehicle,
// starting implicitly at the depot, with no return leg.
struct RouteSolution {
  std::vector<std::vector<int>> routes;
};

// assignment[m] = aisle index of material m
struct SlottingSolution {
  std::vector<int> assignment;
};

// Co-order affinity sigma_mn = O_mn / (delta_m + delta_n - O_mn), where O_mn
// counts orders containing both materials and delta_m counts orders
// containing m. Throws if some pair has a zero denominator.
Eigen::MatrixXd jaccard_affinity(const OrderLog& log);

// Total routing cost: per-distance cost over depot-start legs plus
// consecutive legs, per-stop cost per visited customer, fixed cost per
// nonempty route. Validates the solution first.
double evaluate_ovrp(const OvrpInstance& inst, const RouteSolution& sol);

// Total affinity across aisle boundaries, counted once per ordered pair
// (both (m,n) and (n,m) contribute). Validates coverage and capacities.
double evaluate_asp(const AspInstance& inst, const SlottingSolution& sol);

// Deterministic synthetic generators.
AspInstance generate_asp(std::uint64_t seed, int n_materials, int n_aisles);
AspInstance generate_asp(std::uint64_t seed, int n_materials,
                         std::vector<int> aisle_capacities);
OvrpInstance generate_ovrp(std::uint64_t seed, int n_customers, int maxstop);

// The order log backing generate_asp; exposed so tests can reuse it.
OrderLog generate_order_log(std::uint64_t seed, int n_materials);

// JSON instance files. OVRP keys: "distance", "cost_per_dist",
// "cost_per_stop", "cost_fixed", "maxstop", "n_vehicles". ASP keys:
// "affinity", "aisle_capacities". Matrices are row-major nested arrays.
void save_ovrp(const OvrpInstance& inst, const std::string& path);
void save_asp(const AspInstance& inst, const std::string& path);
OvrpInstance load_ovrp(const std::string& path);
AspInstance load_asp(const std::string& path);
// true if the file holds an ASP instance ("affinity" key present)
bool is_asp_file(const std::string& path);

}  // namespace qsdp
