#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qsdp {

struct HuConfig {
  // feasibility precision; both constraint checks use this threshold
  double epsilon = 1e-2;
  // multiplicative-weights step; 0 selects the adaptive rule
  // min(violation / (2 p^2), 0.45) with p the number of active penalty
  // directions, which matches epsilon/4-style fixed steps near threshold
  // and takes much larger steps when far from it
  double step_size = 0.0;
  // 0 derives ceil(64 ln(n) / epsilon^2)
  int max_iterations = 0;
  // width at which the gamma bisection stops, in units of epsilon*n*||C||
  double bisection_tolerance = 1.0;
  std::uint64_t seed = 0;
  int rounding_samples = 100;
  // telemetry only; no behavioral effect
  std::string device = "cpu";
  // line-delimited JSON per iteration when nonempty
  std::string telemetry_path;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  // keep per-iteration violations in FeasibilityOutcome::trace (can be
  // large for small epsilon)
  bool record_trace = false;

  void validate() const;
};

struct GibbsState {
  Eigen::MatrixXd rho;  // symmetric PSD, unit trace
};

// rho = exp(-h) / tr(exp(-h)) via symmetric eigendecomposition with a
// spectral shift before exponentiation. Throws on non-symmetric or
// non-finite input.
GibbsState gibbs(const Eigen::MatrixXd& h);

// largest absolute eigenvalue
double operator_norm(const Eigen::MatrixXd& c);

struct FeasibilityCheck {
  double objective_violation = 0.0;  // max(0, gamma/n - tr(c rho)) / ||c||
  double diagonal_violation = 0.0;   // sum |rho_ii - 1/n|
  bool feasible = false;
};

// Checks the two threshold-feasibility constraints for a Gibbs state in max
// orientation: the objective must reach gamma/n within epsilon*||c|| from
// below, and the diagonal must be uniform within epsilon in total
// deviation. Pass c_norm when already known; any negative value recomputes.
FeasibilityCheck check_feasibility(const Eigen::MatrixXd& c, double gamma,
                                   double epsilon, const GibbsState& rho,
                                   double c_norm = -1.0);

struct FeasibilityOutcome {
  enum class Verdict { feasible, infeasible } verdict = Verdict::infeasible;
  Eigen::MatrixXd hamiltonian;
  GibbsState rho;  // meaningful for feasible verdicts
  int iterations = 0;
  // (objective_violation, diagonal_violation) per iteration when
  // config.record_trace is set
  std::vector<std::pair<double, double>> trace;
};

// Multiplicative-weights feasibility search from H = 0. Updates H along
// -c/||c|| while the objective constraint is violated and along
// diag(sign(rho_ii - 1/n)) while the diagonal constraint is violated.
// Declares infeasibility once the accumulated mirror-descent progress
// exceeds the relative-entropy budget ln(n) that any exactly feasible
// state would admit, or once the iteration cap is reached.
FeasibilityOutcome hu_feasibility(const Eigen::MatrixXd& c, double gamma,
                                  const HuConfig& config);

struct GateEstimate {
  long n = 0;
  long s = 0;  // max nonzeros per row
  double epsilon = 0.0;
  double prefactor = 1.0;
  double gate_time_seconds = 6.5e-9;
  double gate_count = 0.0;
  double seconds = 0.0;
};

// Parametric model of the quantum running time:
// gates = prefactor * n^1.5 * s^0.5 * epsilon^-5 * ln(n)^polylog_exponent,
// seconds = gates * gate_time. A model estimate, not a measurement; the
// prefactor, gate time and polylog exponent are knobs of the model.
GateEstimate quantum_gate_estimate(long n, long s, double epsilon,
                                   double prefactor = 1.0,
                                   double gate_time_seconds = 6.5e-9,
                                   double polylog_exponent = 2.0);

struct HuResult {
  double gamma_low = 0.0;
  double gamma_high = 0.0;
  // certified relaxation bound on the max-orientation Ising optimum
  // (= gamma_high; every lowering of gamma_high is an infeasibility proof)
  double sdp_bound = 0.0;
  Eigen::VectorXd rounded_vector;  // +/-1 entries, index 0 normalized to +1
  double rounding_bound = 0.0;     // Ising objective of rounded_vector
  long iterations_total = 0;
  double wall_time_seconds = 0.0;
  std::string device;
  GateEstimate gate_estimate;
};

// Bisection over the threshold objective gamma in [-n||c||, n||c||] with the
// feasibility search as oracle, followed by randomized rounding of the last
// feasible Gibbs state. Input must be in max orientation (see
// orient_for_maximization).
HuResult hu_solve(const Eigen::MatrixXd& c, const HuConfig& config);

// Raised when a configured time limit interrupts the solve.
struct HuTimeout : std::runtime_error {
  explicit HuTimeout(const std::string& what, double elapsed)
      : std::runtime_error(what), elapsed_seconds(elapsed) {}
  double elapsed_seconds = 0.0;
};

}  // namespace qsdp
