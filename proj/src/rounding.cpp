#include "qsdp/rounding.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qsdp/rng.hpp"

namespace qsdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Eigen::VectorXd sample_spins(const Eigen::MatrixXd& b, std::uint64_t seed,
                             std::uint64_t sample_index) {
  const Eigen::Index n = b.rows();
  SplitMix64 rng(derive_seed(seed, sample_index));
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g(i) = rng.next_normal();
  Eigen::VectorXd proj = b * g;
  Eigen::VectorXd x(n);
  for (Eigen::Index j = 0; j < n; ++j) x(j) = proj(j) >= 0.0 ? 1.0 : -1.0;
  if (x(0) < 0.0) x = -x;  // objective is flip-invariant
  return x;
}

RoundingReport gw_round_impl(const Eigen::MatrixXd& x_star,
                             const Eigen::MatrixXd& c, std::uint64_t seed,
                             int n_samples, bool parallel) {
  require(x_star.rows() == x_star.cols(), "x_star must be square");
  require(c.rows() == x_star.rows() && c.cols() == x_star.cols(),
          "cost matrix and x_star dimensions differ");
  require(n_samples >= 1, "need at least one sample");

  const Eigen::MatrixXd b = matrix_sqrt(x_star);
  RoundingReport report;
  report.n_samples = n_samples;
  report.seed = seed;
  report.per_sample_values.assign(n_samples, 0.0);

#pragma omp parallel for schedule(static) if (parallel)
  for (int s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd x = sample_spins(b, seed, static_cast<std::uint64_t>(s));
    report.per_sample_values[s] = x.dot(c * x);
  }

  int best = 0;
  for (int s = 1; s < n_samples; ++s)
    if (report.per_sample_values[s] > report.per_sample_values[best]) best = s;
  report.best_value = report.per_sample_values[best];
  report.best_vector = sample_spins(b, seed, static_cast<std::uint64_t>(best));
  return report;
}

}  // namespace

Eigen::MatrixXd matrix_sqrt(const Eigen::MatrixXd& x) {
  require(x.rows() == x.cols(), "matrix must be square");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      require(std::abs(x(i, j) - x(j, i)) <= 1e-9 * scale, "matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x);
  Eigen::VectorXd eig = solver.eigenvalues();
  const double norm = eig.cwiseAbs().maxCoeff();
  const double clip = 1e-10 * norm;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (eig(i) < -clip) {
      std::ostringstream os;
      os << "matrix is indefinite: eigenvalue " << eig(i) << " below -" << clip;
      throw std::invalid_argument(os.str());
    }
    eig(i) = eig(i) > 0.0 ? std::sqrt(eig(i)) : 0.0;
  }
  Eigen::MatrixXd root =
      solver.eigenvectors() * eig.asDiagonal() * solver.eigenvectors().transpose();
  root = 0.5 * (root + root.transpose()).eval();
  return root;
}

RoundingReport gw_round(const Eigen::MatrixXd& x_star, const Eigen::MatrixXd& c,
                        std::uint64_t seed, int n_samples) {
  return gw_round_impl(x_star, c, seed, n_samples, true);
}

RoundingReport gw_round_serial(const Eigen::MatrixXd& x_star,
                               const Eigen::MatrixXd& c, std::uint64_t seed,
                               int n_samples) {
  return gw_round_impl(x_star, c, seed, n_samples, false);
}

OriginalBounds bounds_to_original(const HuResult& hu, const IsingProblem& ising,
                                  const QuboProblem& qubo,
                                  const QuadraticModel& model) {
  require(ising.orientation == Orientation::maximize,
          "pipeline expects the solved problem in max orientation");
  require(ising.dim() == qubo.size() + 1,
          "Ising and QUBO dimensions are inconsistent");
  require(static_cast<int>(qubo.var_map.size()) == qubo.size(),
          "QUBO variable map does not cover the problem");
  require(hu.rounded_vector.size() == ising.dim(),
          "rounded vector does not match the problem dimension");

  OriginalBounds out;
  out.qubo_bits = ising_solution_to_qubo(hu.rounded_vector);
  out.model_assignment = decode_bits(model, qubo, out.qubo_bits);
  out.violations = validate_solution(model, out.model_assignment);

  out.report.method = "hu";
  out.report.lower_bound = -hu.sdp_bound + ising.offset_carry;
  // exact objective of the concrete rounded vector, not the solver's view
  out.report.upper_bound = qubo.value(out.qubo_bits);
  out.report.feasible_at_model = out.violations.empty();
  out.report.wall_time_seconds = hu.wall_time_seconds;
  return out;
}

}  // namespace qsdp
