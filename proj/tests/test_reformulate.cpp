#include <filesystem>
#include <numeric>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "qsdp/instances.hpp"
#include "qsdp/oracle.hpp"
#include "qsdp/reformulate.hpp"
#include "qsdp/rng.hpp"

using namespace qsdp;

namespace {

// all subset sums of a coefficient list
std::set<long> subset_sums(const std::vector<long>& coeffs) {
  std::set<long> sums{0};
  for (long c : coeffs) {
    std::set<long> next = sums;
    for (long s : sums) next.insert(s + c);
    sums = std::move(next);
  }
  return sums;
}

std::set<long> full_range(long bound) {
  std::set<long> range;
  for (long v = 0; v <= bound; ++v) range.insert(v);
  return range;
}

double residual_sum(const QuadraticModel& model, const QuboProblem& qubo,
                    const Eigen::VectorXd& bits) {
  const Eigen::VectorXd values = decode_bits(model, qubo, bits);
  const Eigen::VectorXd slacks = decode_slacks(model, qubo, bits);
  double total = 0.0;
  for (const auto& con : model.eq_constraints) {
    const double r = con.coeffs.dot(values) - static_cast<double>(con.rhs);
    total += r * r;
  }
  for (std::size_t c = 0; c < model.ineq_constraints.size(); ++c) {
    const auto& con = model.ineq_constraints[c];
    const double r = con.coeffs.dot(values) + slacks(c) - static_cast<double>(con.rhs);
    total += r * r;
  }
  return total;
}

}  // namespace

TEST_SUITE_BEGIN("reformulate");

TEST_CASE("slack_coefficients follow the power-of-two-plus-remainder layout") {
  CHECK(slack_coefficients(10) == std::vector<long>{1, 2, 4, 3});
  CHECK(slack_coefficients(1) == std::vector<long>{1});
  CHECK(slack_coefficients(2) == std::vector<long>{1, 1});
  CHECK(slack_coefficients(7) == std::vector<long>{1, 2, 4});
  CHECK_THROWS_AS(slack_coefficients(0), std::invalid_argument);
}

TEST_CASE("slack_coefficients subset sums cover exactly 0..bound") {
  for (long bound = 1; bound <= 64; ++bound) {
    const std::vector<long> coeffs = slack_coefficients(bound);
    CHECK(std::accumulate(coeffs.begin(), coeffs.end(), 0L) == bound);
    CHECK(subset_sums(coeffs) == full_range(bound));
  }
}

TEST_CASE("ASP model has the expected shape") {
  AspInstance inst;
  inst.n_materials = 2;
  inst.affinity = Eigen::MatrixXd::Zero(2, 2);
  inst.affinity(0, 1) = inst.affinity(1, 0) = 0.7;
  inst.aisle_capacities = {1, 1};
  const QuadraticModel model = build_asp_model(inst);
  CHECK(model.n_variables() == 4);
  CHECK(model.eq_constraints.size() == 2);
  CHECK(model.ineq_constraints.size() == 2);
}

TEST_CASE("ASP presolve drops materials with all-zero affinity rows") {
  AspInstance inst = generate_asp(21, 28, std::vector<int>{10, 10, 10});
  inst.n_materials = 30;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(30, 30);
  padded.topLeftCorner(28, 28) = inst.affinity;
  inst.affinity = padded;  // materials 28, 29 never co-ordered
  const QuadraticModel full = build_asp_model(inst, false);
  const QuadraticModel reduced = build_asp_model(inst, true);
  CHECK(full.n_variables() == 90);
  CHECK(reduced.n_variables() == 84);
}

TEST_CASE("ASP model objective matches evaluate_asp") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const AspInstance inst = generate_asp(seed, 6, 2);
    const QuadraticModel model = build_asp_model(inst);
    SplitMix64 rng(seed * 31 + 7);
    SlottingSolution sol;
    // random capacity-respecting assignment
    std::vector<int> room = inst.aisle_capacities;
    for (int m = 0; m < inst.n_materials; ++m) {
      int a;
      do {
        a = static_cast<int>(rng.next_below(inst.n_aisles()));
      } while (room[a] == 0);
      room[a] -= 1;
      sol.assignment.push_back(a);
    }
    const Eigen::VectorXd x = encode_slotting(model, inst, sol);
    CHECK(model.objective_value(x) == doctest::Approx(evaluate_asp(inst, sol)));
  }
}

TEST_CASE("OVRP model has the expected variable counts") {
  const OvrpInstance inst = generate_ovrp(1, 2, 3);
  const QuadraticModel model = build_ovrp_model(inst);
  CHECK(model.n_variables() == 3 * 2 * 1 + 2);  // arcs times vehicles, plus orders
  CHECK(model.eq_constraints.size() == 2);      // one visit constraint per customer
}

TEST_CASE("OVRP model objective matches evaluate_ovrp on encoded routes") {
  const OvrpInstance inst = generate_ovrp(17, 5, 2);
  const QuadraticModel model = build_ovrp_model(inst);
  const RouteSolution sols[] = {
      {{{1, 2}, {3, 4}, {5}}},
      {{{5, 3}, {2}, {4, 1}}},
  };
  for (const auto& sol : sols) {
    const Eigen::VectorXd x = encode_routes(model, inst, sol);
    CHECK(model.objective_value(x) == doctest::Approx(evaluate_ovrp(inst, sol)));
    CHECK(validate_solution(model, x).empty());
  }
}

TEST_CASE("fixed costs change full-usage objectives by a constant") {
  OvrpInstance with = generate_ovrp(3, 4, 2);  // 2 vehicles
  OvrpInstance without = with;
  without.cost_fixed = 0.0;
  const QuadraticModel m_with = build_ovrp_model(with);
  const QuadraticModel m_without = build_ovrp_model(without);
  const RouteSolution full_usage[] = {{{{1, 2}, {3, 4}}}, {{{4, 1}, {2, 3}}}};
  for (const auto& sol : full_usage) {
    const Eigen::VectorXd x = encode_routes(m_with, with, sol);
    CHECK(m_with.objective_value(x) - m_without.objective_value(x) ==
          doctest::Approx(with.cost_fixed * with.n_vehicles));
  }
}

TEST_CASE("to_qubo reproduces the 96-variable layout for 30 materials") {
  AspInstance inst = generate_asp(21, 28, std::vector<int>{10, 10, 10});
  inst.n_materials = 30;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(30, 30);
  padded.topLeftCorner(28, 28) = inst.affinity;
  inst.affinity = padded;
  const QuadraticModel model = build_asp_model(inst, true);
  const QuboProblem qubo = to_qubo(model, {1000.0, PenaltyChoice::Provenance::user_supplied});
  CHECK(qubo.size() == 96);  // 84 assignment bits + 3 aisles x 4 slack bits
  int slack_bits = 0;
  for (const auto& e : qubo.var_map)
    if (e.source == QuboVarBit::Source::slack) ++slack_bits;
  CHECK(slack_bits == 12);
}

TEST_CASE("penalty identity: QUBO value = objective + lambda * squared residuals") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const AspInstance inst = generate_asp(seed + 40, 6, 2);
    const QuadraticModel model = build_asp_model(inst);
    const PenaltyChoice penalty{13.5, PenaltyChoice::Provenance::user_supplied};
    const QuboProblem qubo = to_qubo(model, penalty);
    for (int k = 0; k < 50; ++k) {
      const Eigen::VectorXd bits = test::random_bits(qubo.size(), seed * 100 + k);
      const double expected =
          model.objective_value(decode_bits(model, qubo, bits)) +
          penalty.lambda * residual_sum(model, qubo, bits);
      CHECK(qubo.value(bits) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("penalty identity holds for the integer-variable OVRP encoding") {
  const OvrpInstance inst = generate_ovrp(23, 2, 3);
  const QuadraticModel model = build_ovrp_model(inst);
  const PenaltyChoice penalty{7.0, PenaltyChoice::Provenance::user_supplied};
  const QuboProblem qubo = to_qubo(model, penalty);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd bits = test::random_bits(qubo.size(), 555 + k);
    const double expected = model.objective_value(decode_bits(model, qubo, bits)) +
                            penalty.lambda * residual_sum(model, qubo, bits);
    CHECK(qubo.value(bits) == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("feasible points carry zero penalty") {
  const AspInstance inst = generate_asp(8, 6, 2);
  const QuadraticModel model = build_asp_model(inst);
  const QuboProblem qubo = to_qubo(model, {50.0, PenaltyChoice::Provenance::user_supplied});
  const SlottingSolution sol{{0, 1, 0, 1, 0, 1}};
  const Eigen::VectorXd bits = encode_to_bits(model, qubo, encode_slotting(model, inst, sol));
  CHECK(qubo.value(bits) == doctest::Approx(evaluate_asp(inst, sol)).epsilon(1e-12));
}

TEST_CASE("QUBO minimum equals the model optimum once the penalty forces feasibility") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const AspInstance inst = generate_asp(seed + 60, 4, 2);
    const QuadraticModel model = build_asp_model(inst);
    const double z_star = brute_asp(inst).value;
    for (double factor : {0.75, 1.0, 1.5}) {
      const QuboProblem qubo = to_qubo(model, penalty_heuristic(model, factor));
      CHECK(brute_qubo(qubo).value == doctest::Approx(z_star).epsilon(1e-9));
    }
  }
}

TEST_CASE("QUBO structural facts: symmetry and offset") {
  const AspInstance inst = generate_asp(2, 6, 3);
  const QuadraticModel model = build_asp_model(inst);
  const double lambda = 11.0;
  const QuboProblem qubo = to_qubo(model, {lambda, PenaltyChoice::Provenance::user_supplied});
  CHECK(qubo.q == qubo.q.transpose().eval());
  // binary model, zero objective constant: offset is lambda * sum of rhs^2
  double rhs_sq = 0.0;
  for (const auto& c : model.eq_constraints) rhs_sq += static_cast<double>(c.rhs * c.rhs);
  for (const auto& c : model.ineq_constraints) rhs_sq += static_cast<double>(c.rhs * c.rhs);
  CHECK(qubo.offset == doctest::Approx(lambda * rhs_sq));
  CHECK(static_cast<int>(qubo.var_map.size()) == qubo.size());
}

TEST_CASE("penalty heuristic scales the coefficient mass") {
  QuadraticModel model;
  model.variables.push_back({"x", 0, 1});
  model.linear = Eigen::VectorXd::Constant(1, 300.0);
  model.quadratic = Eigen::MatrixXd::Zero(1, 1);
  CHECK(penalty_heuristic(model, 1.0).lambda == doctest::Approx(300.0));
  CHECK(penalty_heuristic(model, 1.5).lambda == doctest::Approx(450.0));

  model.linear.setZero();
  CHECK(penalty_heuristic(model, 1.0).lambda == 1.0);  // degenerate guard
  CHECK(penalty_heuristic(model, 1.0).provenance == PenaltyChoice::Provenance::heuristic);
  CHECK_THROWS_AS(penalty_heuristic(model, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(penalty_heuristic(model, 2.0), std::invalid_argument);
}

TEST_CASE("QUBO files round-trip through the sparse text format") {
  namespace fs = std::filesystem;
  const AspInstance inst = generate_asp(14, 6, 2);
  const QuadraticModel model = build_asp_model(inst);
  const QuboProblem qubo = to_qubo(model, penalty_heuristic(model, 1.0));
  const auto path = (fs::temp_directory_path() / "qsdp-roundtrip.qubo").string();
  save_qubo(qubo, path);
  const QuboProblem loaded = load_qubo(path);
  CHECK(loaded.size() == qubo.size());
  CHECK(loaded.offset == qubo.offset);
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd bits = test::random_bits(qubo.size(), 900 + k);
    CHECK(loaded.value(bits) == doctest::Approx(qubo.value(bits)).epsilon(1e-12));
  }
}

TEST_CASE("infeasible inequalities are rejected at compile time") {
  QuadraticModel model;
  model.variables.push_back({"x", 0, 1});
  model.linear = Eigen::VectorXd::Zero(1);
  model.quadratic = Eigen::MatrixXd::Zero(1, 1);
  LinearConstraint c;
  c.label = "impossible";
  c.coeffs = Eigen::VectorXd::Constant(1, 1.0);
  c.rhs = -1;  // x <= -1 cannot hold for x in {0,1}
  model.ineq_constraints.push_back(c);
  CHECK_THROWS_WITH_AS(to_qubo(model, {1.0, PenaltyChoice::Provenance::user_supplied}),
                       doctest::Contains("impossible"), std::invalid_argument);
}

TEST_SUITE_END();
