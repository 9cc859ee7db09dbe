#include "qsdp/hu.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qsdp/rounding.hpp"

namespace qsdp {

namespace {

using Clock = std::chrono::steady_clock;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_symmetric_finite(const Eigen::MatrixXd& m, const char* what) {
  require(m.rows() == m.cols(), std::string(what) + " must be square");
  double scale = 1.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      require(std::isfinite(m(i, j)) && std::isfinite(m(j, i)),
              std::string(what) + " has non-finite entries");
      scale = std::max({scale, std::abs(m(i, j)), std::abs(m(j, i))});
    }
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < i; ++j)
      require(std::abs(m(i, j) - m(j, i)) <= 1e-9 * scale,
              std::string(what) + " must be symmetric");
}

// workspace reused across the many eigendecompositions of one solve
struct GibbsWorkspace {
  explicit GibbsWorkspace(int n) : solver(n), weights(n), rho(n, n) {}

  void compute(const Eigen::MatrixXd& h) {
    solver.compute(h);
    const auto& eig = solver.eigenvalues();
    const double shift = eig.minCoeff();
    weights = (-(eig.array() - shift)).exp();
    const double total = weights.sum();
    rho.noalias() = solver.eigenvectors() * (weights / total).matrix().asDiagonal() *
                    solver.eigenvectors().transpose();
    // V D V^T is symmetric only up to rounding
    rho = 0.5 * (rho + rho.transpose()).eval();
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  Eigen::ArrayXd weights;
  Eigen::MatrixXd rho;
};

struct Violations {
  double objective = 0.0;
  double diagonal = 0.0;
};

Violations measure(const Eigen::MatrixXd& c, double gamma, double c_norm,
                   const Eigen::MatrixXd& rho) {
  const double n = static_cast<double>(c.rows());
  const double attained = c.cwiseProduct(rho).sum();
  const double deficit = gamma / n - attained;
  Violations v;
  if (c_norm > 0.0)
    v.objective = std::max(0.0, deficit) / c_norm;
  else
    v.objective = deficit > 1e-15 ? std::numeric_limits<double>::infinity() : 0.0;
  v.diagonal = (rho.diagonal().array() - 1.0 / n).abs().sum();
  return v;
}

struct LoopContext {
  double c_norm = 0.0;
  Clock::time_point start;
  double time_limit = std::numeric_limits<double>::infinity();
  std::ofstream* telemetry = nullptr;
  std::string device;
  long global_iteration = 0;
};

double elapsed_seconds(const Clock::time_point& start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int derived_iteration_cap(const HuConfig& config, int n) {
  if (config.max_iterations > 0) return config.max_iterations;
  const double cap = 64.0 * std::log(static_cast<double>(n)) /
                     (config.epsilon * config.epsilon);
  return std::max(1, static_cast<int>(std::ceil(cap)));
}

FeasibilityOutcome run_feasibility(const Eigen::MatrixXd& c, double gamma,
                                   const HuConfig& config, LoopContext& ctx) {
  const int n = static_cast<int>(c.rows());
  const double eps = config.epsilon;
  const int cap = derived_iteration_cap(config, n);
  const double entropy_budget = std::log(static_cast<double>(n));

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd objective_step;
  if (ctx.c_norm > 0.0) objective_step = c / ctx.c_norm;
  GibbsWorkspace ws(n);

  FeasibilityOutcome out;
  double spent = 0.0;
  for (int iter = 1; iter <= cap; ++iter) {
    const double elapsed = elapsed_seconds(ctx.start);
    if (elapsed > ctx.time_limit || ctx.time_limit <= 0.0) {
      std::ostringstream os;
      os << "time limit of " << ctx.time_limit << " s exceeded after "
         << ctx.global_iteration << " iterations";
      throw HuTimeout(os.str(), elapsed);
    }
    ++ctx.global_iteration;

    ws.compute(h);
    const Violations v = measure(c, gamma, ctx.c_norm, ws.rho);
    if (config.record_trace) out.trace.emplace_back(v.objective, v.diagonal);
    if (ctx.telemetry && ctx.telemetry->is_open()) {
      *ctx.telemetry << "{\"iteration\":" << ctx.global_iteration
                     << ",\"gamma\":" << gamma
                     << ",\"objective_violation\":" << v.objective
                     << ",\"diagonal_violation\":" << v.diagonal
                     << ",\"elapsed_seconds\":" << elapsed
                     << ",\"device\":\"" << ctx.device << "\"}\n";
    }

    const bool obj_bad = v.objective >= eps;
    const bool diag_bad = v.diagonal >= eps;
    if (!obj_bad && !diag_bad) {
      out.verdict = FeasibilityOutcome::Verdict::feasible;
      out.hamiltonian = std::move(h);
      out.rho.rho = ws.rho;
      out.iterations = iter;
      return out;
    }

    const double directions = (obj_bad ? 1.0 : 0.0) + (diag_bad ? 1.0 : 0.0);
    const double violation = (obj_bad ? v.objective : 0.0) + (diag_bad ? v.diagonal : 0.0);
    const double eta = config.step_size > 0.0
                           ? config.step_size
                           : std::min(violation / (2.0 * directions * directions), 0.45);
    // mirror-descent progress any exactly feasible state must absorb;
    // exceeding the ln(n) budget of the uniform start proves there is none
    spent += eta * violation - eta * eta * directions * directions;
    if (obj_bad) h.noalias() -= eta * objective_step;
    if (diag_bad) {
      const double inv_n = 1.0 / static_cast<double>(n);
      for (int i = 0; i < n; ++i) {
        const double d = ws.rho(i, i) - inv_n;
        if (d > 0.0)
          h(i, i) += eta;
        else if (d < 0.0)
          h(i, i) -= eta;
      }
    }
    if (spent > entropy_budget) {
      out.verdict = FeasibilityOutcome::Verdict::infeasible;
      out.iterations = iter;
      return out;
    }
  }
  out.verdict = FeasibilityOutcome::Verdict::infeasible;
  out.iterations = cap;
  return out;
}

}  // namespace

void HuConfig::validate() const {
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  require(step_size >= 0.0, "step_size must be nonnegative");
  require(step_size <= 0.45, "step_size above 0.45 voids the infeasibility argument");
  require(max_iterations >= 0, "max_iterations must be positive (0 = derived)");
  require(bisection_tolerance > 0.0, "bisection_tolerance must be positive");
  require(rounding_samples >= 1, "need at least one rounding sample");
}

GibbsState gibbs(const Eigen::MatrixXd& h) {
  check_symmetric_finite(h, "Hamiltonian");
  GibbsWorkspace ws(static_cast<int>(h.rows()));
  ws.compute(h);
  GibbsState state;
  state.rho = ws.rho;
  return state;
}

double operator_norm(const Eigen::MatrixXd& c) {
  check_symmetric_finite(c, "matrix");
  if (c.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

FeasibilityCheck check_feasibility(const Eigen::MatrixXd& c, double gamma,
                                   double epsilon, const GibbsState& rho,
                                   double c_norm) {
  check_symmetric_finite(c, "cost matrix");
  require(rho.rho.rows() == c.rows(), "state dimension mismatch");
  if (c_norm < 0.0) c_norm = operator_norm(c);
  const Violations v = measure(c, gamma, c_norm, rho.rho);
  FeasibilityCheck out;
  out.objective_violation = v.objective;
  out.diagonal_violation = v.diagonal;
  out.feasible = v.objective < epsilon && v.diagonal < epsilon;
  return out;
}

FeasibilityOutcome hu_feasibility(const Eigen::MatrixXd& c, double gamma,
                                  const HuConfig& config) {
  config.validate();
  check_symmetric_finite(c, "cost matrix");
  LoopContext ctx;
  ctx.c_norm = operator_norm(c);
  ctx.start = Clock::now();
  ctx.time_limit = config.time_limit_seconds;
  ctx.device = config.device;
  std::ofstream telemetry;
  if (!config.telemetry_path.empty()) {
    telemetry.open(config.telemetry_path);
    ctx.telemetry = &telemetry;
  }
  FeasibilityOutcome out = run_feasibility(c, gamma, config, ctx);
  if (out.verdict == FeasibilityOutcome::Verdict::feasible) {
    const FeasibilityCheck recheck =
        check_feasibility(c, gamma, config.epsilon, out.rho, ctx.c_norm);
    require(recheck.feasible, "feasible state failed re-verification");
  }
  return out;
}

GateEstimate quantum_gate_estimate(long n, long s, double epsilon,
                                   double prefactor, double gate_time_seconds,
                                   double polylog_exponent) {
  require(n >= 1 && s >= 1, "n and s must be at least 1");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)");
  GateEstimate est;
  est.n = n;
  est.s = s;
  est.epsilon = epsilon;
  est.prefactor = prefactor;
  est.gate_time_seconds = gate_time_seconds;
  const double nd = static_cast<double>(n);
  const double inv_eps = 1.0 / epsilon;
  const double inv2 = inv_eps * inv_eps;
  const double inv_eps5 = inv2 * inv2 * inv_eps;  // plain products scale exactly in 2
  const double log_n = std::log(nd);
  const double polylog = polylog_exponent == 2.0 ? log_n * log_n
                                                 : std::pow(log_n, polylog_exponent);
  est.gate_count = prefactor * nd * std::sqrt(nd) *
                   std::sqrt(static_cast<double>(s)) * inv_eps5 * polylog;
  est.seconds = est.gate_count * gate_time_seconds;
  return est;
}

HuResult hu_solve(const Eigen::MatrixXd& c, const HuConfig& config) {
  config.validate();
  check_symmetric_finite(c, "cost matrix");
  const int n = static_cast<int>(c.rows());
  require(n >= 1, "cost matrix must be nonempty");

  LoopContext ctx;
  ctx.c_norm = operator_norm(c);
  ctx.start = Clock::now();
  ctx.time_limit = config.time_limit_seconds;
  ctx.device = config.device;
  std::ofstream telemetry;
  if (!config.telemetry_path.empty()) {
    telemetry.open(config.telemetry_path);
    ctx.telemetry = &telemetry;
  }

  // pad the bracket so eigensolver rounding in the norm cannot clip the
  // true optimum off the gamma_high side
  const double scale = static_cast<double>(n) * ctx.c_norm * (1.0 + 1e-10);
  const double tol = config.bisection_tolerance * config.epsilon * scale;
  double lo = -scale;
  double hi = scale;
  bool have_state = false;
  GibbsState state;

  while (hi - lo > tol) {
    const double gamma = 0.5 * (lo + hi);
    const FeasibilityOutcome outcome = run_feasibility(c, gamma, config, ctx);
    if (outcome.verdict == FeasibilityOutcome::Verdict::feasible) {
      lo = gamma;
      state = outcome.rho;
      have_state = true;
    } else {
      hi = gamma;
    }
  }
  if (!have_state) {
    // gamma = -n||c|| is feasible for the uniform state by construction
    const FeasibilityOutcome outcome = run_feasibility(c, lo, config, ctx);
    require(outcome.verdict == FeasibilityOutcome::Verdict::feasible,
            "feasibility failed at the lower bracket end");
    state = outcome.rho;
  }
  // re-verify before reporting the state that rounding consumes
  const FeasibilityCheck recheck =
      check_feasibility(c, lo, config.epsilon, state, ctx.c_norm);
  require(recheck.feasible, "feasible state failed re-verification");

  const Eigen::MatrixXd x_star = static_cast<double>(n) * state.rho;
  const RoundingReport rounding =
      gw_round(x_star, c, config.seed, config.rounding_samples);

  HuResult result;
  result.gamma_low = lo;
  result.gamma_high = hi;
  result.sdp_bound = hi;
  result.rounded_vector = rounding.best_vector;
  result.rounding_bound = rounding.best_value;
  result.iterations_total = ctx.global_iteration;
  result.wall_time_seconds = elapsed_seconds(ctx.start);
  result.device = config.device;
  long max_row_nnz = 1;
  for (int i = 0; i < n; ++i) {
    long nnz = 0;
    for (int j = 0; j < n; ++j)
      if (c(i, j) != 0.0) ++nnz;
    max_row_nnz = std::max(max_row_nnz, nnz);
  }
  result.gate_estimate = quantum_gate_estimate(n, max_row_nnz, config.epsilon);
  return result;
}

}  // namespace qsdp
