#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qsdp/instances.hpp"

namespace qsdp {

struct IntegerVariable {
  std::string name;
  long lower = 0;
  long upper = 1;

  bool is_binary() const { return lower == 0 && upper == 1; }
};

// a . x (= | <=) rhs, with integral rhs so inequality slacks stay integer
struct LinearConstraint {
  std::string label;
  Eigen::VectorXd coeffs;
  long rhs = 0;
};

// Generic integer quadratic program: quadratic objective over bounded
// integer variables with linear equality and <=-inequality constraints.
// Shared intermediate representation between the logistics models and the
// QUBO compiler.
struct QuadraticModel {
  std::vector<IntegerVariable> variables;
  double objective_constant = 0.0;
  Eigen::VectorXd linear;     // size n
  Eigen::MatrixXd quadratic;  // n x n, symmetric
  std::vector<LinearConstraint> eq_constraints;
  std::vector<LinearConstraint> ineq_constraints;

  int n_variables() const { return static_cast<int>(variables.size()); }
  double objective_value(const Eigen::VectorXd& x) const;
  void validate() const;
};

struct PenaltyChoice {
  double lambda = 1.0;
  enum class Provenance { user_supplied, heuristic } provenance =
      Provenance::user_supplied;
};

// One QUBO bit together with where it came from: either one bit of a model
// variable's binary expansion, or one bit of an inequality slack.
struct QuboVarBit {
  enum class Source { model_variable, slack } source = Source::model_variable;
  int index = 0;    // model variable index, or inequality constraint index
  long weight = 0;  // contribution of this bit to the encoded value
};

struct QuboProblem {
  Eigen::MatrixXd q;  // symmetric; linear terms live on the diagonal
  double offset = 0.0;
  std::vector<QuboVarBit> var_map;

  int size() const { return static_cast<int>(q.rows()); }
  double value(const Eigen::VectorXd& bits) const;
};

// Slack bit weights for an integer in [0, bound]: 1, 2, 4, ..., 2^(r-1),
// bound - (2^r - 1) with r = floor(log2(bound)). Subset sums cover exactly
// {0, ..., bound}.
std::vector<long> slack_coefficients(long bound);

// IQP for the slotting problem: one binary per (material, aisle), the
// cross-aisle affinity objective, one assignment equality per material and
// one capacity inequality per aisle. With drop_zero_affinity, materials
// whose affinity row is all zero are left out (their placement never
// affects the objective and spare capacity always accommodates them).
QuadraticModel build_asp_model(const AspInstance& inst,
                               bool drop_zero_affinity = false);

// IP for the open routing problem: binaries x[i][j][k] for each arc and
// vehicle, integer visit orders u[i] in [1, n], the cost objective, and the
// visit/leave/flow/order/depart/maxstop constraint family in eq / <= form.
// The depart constraints cap each vehicle at one depot departure, so model
// solutions coincide with partitions into at most n_vehicles open routes.
QuadraticModel build_ovrp_model(const OvrpInstance& inst);

// Penalized QUBO: equalities g(x)=b contribute lambda*(g(x)-b)^2,
// inequalities g(x)<=b get a binarized integer slack s and contribute
// lambda*(g(x)+s-b)^2, and integer variables are binarized with
// slack_coefficients. For every bit vector,
//   value(bits) = model objective + lambda * sum of squared residuals.
QuboProblem to_qubo(const QuadraticModel& model, const PenaltyChoice& penalty);

// lambda = ceil(factor * sum of absolute objective coefficients); 1 when the
// objective is identically zero. Useful factors sit between 0.75 and 1.50.
PenaltyChoice penalty_heuristic(const QuadraticModel& model, double factor);

// Model-variable values encoded by a bit vector (lower bound plus weighted
// bits; slack bits are skipped).
Eigen::VectorXd decode_bits(const QuadraticModel& model, const QuboProblem& qubo,
                            const Eigen::VectorXd& bits);

// Slack value per inequality constraint encoded by a bit vector.
Eigen::VectorXd decode_slacks(const QuadraticModel& model, const QuboProblem& qubo,
                              const Eigen::VectorXd& bits);

// Bit vector representing a model assignment, with each inequality slack set
// to the value that minimizes its residual (the exact residual for feasible
// points). Inverse of decode_bits on in-range integral assignments.
Eigen::VectorXd encode_to_bits(const QuadraticModel& model, const QuboProblem& qubo,
                               const Eigen::VectorXd& assignment);

// Model assignment for a slotting solution / route solution, in the
// variable order produced by the matching builder.
Eigen::VectorXd encode_slotting(const QuadraticModel& model, const AspInstance& inst,
                                const SlottingSolution& sol);
Eigen::VectorXd encode_routes(const QuadraticModel& model, const OvrpInstance& inst,
                              const RouteSolution& sol);

// Sparse upper-triangle text format: header "n offset", then "i j value"
// lines (0-based, i <= j; off-diagonal values stored once as the
// symmetric-sum coefficient q_ij + q_ji).
void save_qubo(const QuboProblem& qubo, const std::string& path);
QuboProblem load_qubo(const std::string& path);

}  // namespace qsdp
