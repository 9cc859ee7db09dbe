#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "qsdp/instances.hpp"
#include "qsdp/rounding.hpp"

using namespace qsdp;

TEST_SUITE_BEGIN("rounding");

TEST_CASE("matrix_sqrt fixed points and closed forms") {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  CHECK((matrix_sqrt(id) - id).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
  const Eigen::MatrixXd root = matrix_sqrt(ones);
  CHECK((root - ones / std::sqrt(2.0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix_sqrt reconstructs random PSD matrices") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Eigen::MatrixXd a = test::random_symmetric(7, seed);
    const Eigen::MatrixXd psd = a * a.transpose();
    const Eigen::MatrixXd b = matrix_sqrt(psd);
    CHECK(b == b.transpose().eval());
    const double scale = std::max(1.0, psd.cwiseAbs().maxCoeff());
    CHECK(((b * b - psd).cwiseAbs().maxCoeff() / scale) < 1e-8);
  }
}

TEST_CASE("matrix_sqrt rejects indefinite input with the eigenvalue") {
  Eigen::MatrixXd indef = Eigen::MatrixXd::Zero(2, 2);
  indef(0, 0) = 1.0;
  indef(1, 1) = -1.0;
  CHECK_THROWS_WITH_AS(matrix_sqrt(indef), doctest::Contains("indefinite"),
                       std::invalid_argument);
}

TEST_CASE("rank-one rounding forces aligned signs") {
  const int n = 5;
  const Eigen::MatrixXd x_star = Eigen::MatrixXd::Ones(n, n);
  const Eigen::MatrixXd c = test::random_symmetric(n, 3);
  const RoundingReport report = gw_round(x_star, c, 11, 40);
  // every sample collapses to the all-ones vector after the pin flip
  CHECK(report.best_vector == Eigen::VectorXd::Ones(n));
  CHECK(report.best_value == doctest::Approx(c.sum()));
  for (double v : report.per_sample_values) CHECK(v == doctest::Approx(c.sum()));
}

TEST_CASE("zero cost matrix rounds to value zero") {
  const RoundingReport report =
      gw_round(Eigen::MatrixXd::Identity(4, 4), Eigen::MatrixXd::Zero(4, 4), 5, 10);
  CHECK(report.best_value == 0.0);
  for (Eigen::Index i = 0; i < 4; ++i)
    CHECK(std::abs(report.best_vector(i)) == 1.0);
}

TEST_CASE("rounding is deterministic per seed and schedule-invariant") {
  const Eigen::MatrixXd a = test::random_symmetric(9, 17);
  Eigen::MatrixXd x_star = a * a.transpose();
  x_star /= x_star.diagonal().maxCoeff();
  const Eigen::MatrixXd c = test::random_symmetric(9, 23);

  const RoundingReport r1 = gw_round(x_star, c, 7, 64);
  const RoundingReport r2 = gw_round(x_star, c, 7, 64);
  const RoundingReport serial = gw_round_serial(x_star, c, 7, 64);
  CHECK(r1.best_value == r2.best_value);
  CHECK(r1.best_vector == r2.best_vector);
  CHECK(r1.per_sample_values == r2.per_sample_values);
  CHECK(r1.best_value == serial.best_value);
  CHECK(r1.best_vector == serial.best_vector);
  CHECK(r1.per_sample_values == serial.per_sample_values);

  const RoundingReport other_seed = gw_round(x_star, c, 8, 64);
  CHECK(other_seed.per_sample_values != r1.per_sample_values);
}

TEST_CASE("best value is attained by the reported vector and samples") {
  const Eigen::MatrixXd a = test::random_symmetric(8, 40);
  Eigen::MatrixXd x_star = a * a.transpose() / 8.0;
  const Eigen::MatrixXd c = test::random_symmetric(8, 41);
  const RoundingReport report = gw_round(x_star, c, 3, 32);
  CHECK(report.best_vector.dot(c * report.best_vector) ==
        doctest::Approx(report.best_value));
  for (double v : report.per_sample_values) CHECK(v <= report.best_value + 1e-12);
  CHECK(report.best_vector(0) == 1.0);
}

TEST_CASE("seeds change tightness, never validity, of the rounding bound") {
  const Eigen::MatrixXd c = test::random_symmetric(8, 55);
  IsingProblem p;
  p.c = c;
  p.orientation = Orientation::maximize;
  const double optimum = brute_ising(p).value;
  const Eigen::MatrixXd a = test::random_symmetric(8, 56);
  Eigen::MatrixXd x_star = a * a.transpose();
  x_star /= x_star.diagonal().maxCoeff();
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const RoundingReport report = gw_round(x_star, c, seed, 16);
    CHECK(report.best_value <= optimum + 1e-9);  // always an attained value
  }
}

TEST_CASE("bounds_to_original on the zero problem is all zeros") {
  AspInstance inst;
  inst.n_materials = 2;
  inst.affinity = Eigen::MatrixXd::Zero(2, 2);
  inst.aisle_capacities = {2, 2};
  const QuadraticModel model = build_asp_model(inst);
  QuadraticModel relaxed = model;
  relaxed.eq_constraints.clear();  // keep the objective identically zero
  relaxed.ineq_constraints.clear();
  const QuboProblem qubo = to_qubo(relaxed, {1.0, PenaltyChoice::Provenance::user_supplied});
  const IsingProblem ising = orient_for_maximization(qubo_to_ising(qubo));
  HuConfig config;
  const HuResult hu = hu_solve(ising.c, config);
  const OriginalBounds out = bounds_to_original(hu, ising, qubo, relaxed);
  CHECK(out.report.lower_bound == doctest::Approx(0.0));
  CHECK(*out.report.upper_bound == doctest::Approx(0.0));
}

TEST_CASE("oracle sandwich through the full pipeline on a tiny slotting problem") {
  const AspInstance inst = generate_asp(91, 4, 2);
  const QuadraticModel model = build_asp_model(inst);
  const QuboProblem qubo = to_qubo(model, penalty_heuristic(model, 1.0));
  const IsingProblem ising = orient_for_maximization(qubo_to_ising(qubo));
  HuConfig config;
  config.epsilon = 1e-2;
  config.seed = 4;
  const HuResult hu = hu_solve(ising.c, config);
  const OriginalBounds out = bounds_to_original(hu, ising, qubo, model);

  const double z_star = brute_asp(inst).value;
  CHECK(out.report.lower_bound <= z_star + 1e-9);
  CHECK(z_star <= *out.report.upper_bound + 1e-9);
  CHECK(out.report.method == "hu");
}

TEST_CASE("infeasible rounded vectors are flagged but still priced") {
  const AspInstance inst = generate_asp(92, 4, 2);
  const QuadraticModel model = build_asp_model(inst);
  const QuboProblem qubo = to_qubo(model, {25.0, PenaltyChoice::Provenance::user_supplied});
  const IsingProblem ising = orient_for_maximization(qubo_to_ising(qubo));

  // hand-build a solver result whose rounded vector crowds aisle 0
  Eigen::VectorXd bits = encode_to_bits(
      model, qubo, encode_slotting(model, inst, {{0, 0, 0, 0}}));
  HuResult hu;
  hu.rounded_vector = qubo_solution_to_ising(bits);
  hu.sdp_bound = 0.0;
  const OriginalBounds out = bounds_to_original(hu, ising, qubo, model);
  CHECK_FALSE(*out.report.feasible_at_model);
  CHECK_FALSE(out.violations.empty());
  CHECK(*out.report.upper_bound == doctest::Approx(qubo.value(bits)));
}

TEST_CASE("bounds_to_original rejects inconsistent pipeline artifacts") {
  const AspInstance inst = generate_asp(93, 4, 2);
  const QuadraticModel model = build_asp_model(inst);
  const QuboProblem qubo = to_qubo(model, {25.0, PenaltyChoice::Provenance::user_supplied});
  const IsingProblem min_form = qubo_to_ising(qubo);
  HuResult hu;
  hu.rounded_vector = Eigen::VectorXd::Ones(qubo.size() + 1);
  CHECK_THROWS_AS(bounds_to_original(hu, min_form, qubo, model),
                  std::invalid_argument);  // wrong orientation
}

TEST_SUITE_END();
