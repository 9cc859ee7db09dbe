#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "qsdp/encoding.hpp"
#include "qsdp/instances.hpp"
#include "qsdp/reformulate.hpp"

namespace qsdp {

// Bound-versus-optimum summary shared by the solver pipeline and the
// benchmark harness.
struct BoundReport {
  std::optional<double> z_star;
  double lower_bound = 0.0;
  std::optional<double> upper_bound;
  std::optional<double> delta_abs_lower, delta_rel_lower;
  std::optional<double> delta_abs_upper, delta_rel_upper;
  std::string method;
  double wall_time_seconds = 0.0;
  std::optional<bool> feasible_at_model;
  // true when z_star == 0 made the relative gaps undefined
  bool relative_undefined = false;
};

struct BruteResult {
  double value = 0.0;
  Eigen::VectorXd argmin;  // bits for QUBO, spins for Ising
};

// Exact QUBO minimum by Gray-code enumeration of all 2^n bit vectors with
// O(n) incremental updates. The OpenMP kernel partitions the cube by
// leading-bit prefix; the serial variant is the reference used in tests and
// the kernel benchmark. Ties resolve to the lexicographically smallest bit
// pattern (low index = least significant), so results are
// schedule-invariant.
BruteResult brute_qubo(const QuboProblem& qubo, int max_bits = 26);
BruteResult brute_qubo_serial(const QuboProblem& qubo, int max_bits = 26);

// Exact Ising optimum over spin vectors with x(0) = +1, honoring the
// orientation flag.
BruteResult brute_ising(const IsingProblem& ising, int max_bits = 26);
BruteResult brute_ising_serial(const IsingProblem& ising, int max_bits = 26);

// Exact slotting optimum over capacity-feasible assignments. Refuses when
// the number of such assignments exceeds max_assignments.
struct AspBruteResult {
  double value = 0.0;
  SlottingSolution solution;
};
AspBruteResult brute_asp(const AspInstance& inst, long max_assignments = 10'000'000);

// Exact routing optimum over partitions of the customers into at most
// n_vehicles ordered open routes of length <= maxstop. Enumerates routes
// directly rather than going through the integer model.
struct OvrpBruteResult {
  double value = 0.0;
  RouteSolution solution;
};
OvrpBruteResult brute_ovrp(const OvrpInstance& inst, int max_customers = 8);

// Constraint check of a full model assignment; one entry per violated
// constraint or variable bound. Empty result means feasible.
struct Violation {
  std::string label;
  double residual = 0.0;  // amount by which the constraint is missed
};
std::vector<Violation> validate_solution(const QuadraticModel& model,
                                         const Eigen::VectorXd& assignment);

// Gap metrics against a known optimum. Relative gaps are left unset when
// z_star is zero.
BoundReport metrics(double z_star, double lower,
                    std::optional<double> upper = std::nullopt);

}  // namespace qsdp
