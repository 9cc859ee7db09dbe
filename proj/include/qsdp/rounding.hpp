#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qsdp/encoding.hpp"
#include "qsdp/hu.hpp"
#include "qsdp/oracle.hpp"

namespace qsdp {

// Symmetric square root of a PSD matrix via eigendecomposition. Small
// negative eigenvalues (>= -1e-10 * ||x||) are clipped to zero; anything
// more negative is rejected with the offending eigenvalue.
Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& x);

struct RoundingReport {
  Eigen::VectorXd best_vector;  // +/-1 entries, index 0 normalized to +1
  double best_value = 0.0;      // objective x^T c x of best_vector
  int n_samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> per_sample_values;
};

// Randomized hyperplane rounding: factor x_star = B^T B, project the columns
// of B onto Gaussian vectors, take signs (ties to +1), flip so entry 0 is
// +1, keep the sample with the best objective under c (max orientation).
// Per-sample randomness derives from (seed, sample index), so results do not
// depend on how samples are scheduled across threads.
RoundingReport gw_round(const Eigen::MatrixXd& x_star, const Eigen::MatrixXd& c,
                        std::uint64_t seed, int n_samples);
RoundingReport gw_round_serial(const Eigen::MatrixXd& x_star,
                               const Eigen::MatrixXd& c, std::uint64_t seed,
                               int n_samples);

// Solver output mapped back into original-problem units.
struct OriginalBounds {
  BoundReport report;               // lower/upper bounds in model units
  Eigen::VectorXd qubo_bits;        // rounded vector as QUBO bits
  Eigen::VectorXd model_assignment; // decoded model variable values
  std::vector<Violation> violations;  // of the decoded assignment
};

// Reverses the pipeline: the certified gamma bound maps through orientation
// negation and the conversion offsets to a lower bound on the model optimum;
// the rounded vector decodes to a candidate assignment whose exact QUBO
// objective is reported as the upper bound, flagged with its model-level
// feasibility (the penalty formulation permits infeasible binaries).
OriginalBounds bounds_to_original(const HuResult& hu, const IsingProblem& ising,
                                  const QuboProblem& qubo,
                                  const QuadraticModel& model);

}  // namespace qsdp
