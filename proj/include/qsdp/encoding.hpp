#pragma once

#include <Eigen/Dense>
#include <string>

#include "qsdp/reformulate.hpp"

namespace qsdp {

enum class Orientation { minimize, maximize };

// +/-1 formulation of a QUBO. Index 0 is an auxiliary spin pinned to +1;
// objective values are flip-invariant, so the pin is enforced by a global
// sign flip rather than a constraint. offset_carry holds the constants
// folded out during conversion, so that for every b in {0,1}^n and
// x = (1, 2b - 1):
//   qubo value of b = orientation_sign * (x^T c x) + offset_carry.
struct IsingProblem {
  Eigen::MatrixXd c;  // (n+1) x (n+1) symmetric
  Orientation orientation = Orientation::minimize;
  double offset_carry = 0.0;

  int dim() const { return static_cast<int>(c.rows()); }
  // quadratic form x^T c x; x must have entries +/-1 with x(0) meaningful
  double objective(const Eigen::VectorXd& x) const;
};

// Appendix-style embedding: c = 1/4 * [[sum q, column sums], [column sums, q]],
// minimize orientation, offset_carry = qubo offset.
IsingProblem qubo_to_ising(const QuboProblem& qubo);

// b_i = (x_i + 1) / 2 after flipping the whole vector if x(0) == -1.
// Throws on entries that are not +/-1.
Eigen::VectorXd ising_solution_to_qubo(const Eigen::VectorXd& x);

// spin vector (1, 2b - 1) for a bit vector b
Eigen::VectorXd qubo_solution_to_ising(const Eigen::VectorXd& bits);

// Negates the cost matrix so the problem reads max x^T c x; the solver
// consumes max form only.
IsingProblem orient_for_maximization(const IsingProblem& p);

// Moves the (constant) diagonal contribution trace(c) into offset_carry,
// leaving objective values unchanged; in +/-1 variables diagonal terms are
// constant.
IsingProblem fold_diagonal(const IsingProblem& p);

// Same sparse triplet format as QUBO files, with a pinned-index header flag.
void save_ising(const IsingProblem& p, const std::string& path);

}  // namespace qsdp
