#include "doctest.h"
#include "helpers.hpp"
#include "qsdp/instances.hpp"
#include "qsdp/oracle.hpp"
#include "qsdp/reformulate.hpp"

using namespace qsdp;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("brute_qubo basics") {
  QuboProblem zero;
  zero.q = Eigen::MatrixXd::Zero(4, 4);
  zero.offset = 5.0;
  const BruteResult r = brute_qubo(zero);
  CHECK(r.value == 5.0);
  CHECK(r.argmin == Eigen::VectorXd::Zero(4));  // canonical minimizer

  QuboProblem q2;
  q2.q = Eigen::MatrixXd(2, 2);
  q2.q << 1, 2, 2, -1;
  const BruteResult r2 = brute_qubo(q2);
  CHECK(r2.value == doctest::Approx(-1.0));
  CHECK(r2.argmin(0) == 0.0);
  CHECK(r2.argmin(1) == 1.0);
}

TEST_CASE("brute_qubo refuses above the cap") {
  QuboProblem big;
  big.q = Eigen::MatrixXd::Zero(30, 30);
  CHECK_THROWS_WITH_AS(brute_qubo(big), doctest::Contains("cap"),
                       std::invalid_argument);
  CHECK_NOTHROW(brute_qubo(big, 30));  // cap is configuration
}

TEST_CASE("serial and parallel enumerations agree bit for bit") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const QuboProblem qubo = test::random_qubo(11, seed, seed * 0.3);
    const BruteResult a = brute_qubo(qubo);
    const BruteResult b = brute_qubo_serial(qubo);
    CHECK(a.value == b.value);
    CHECK(a.argmin == b.argmin);

    const IsingProblem ising = test::random_max_ising(10, seed + 50);
    const BruteResult c = brute_ising(ising);
    const BruteResult d = brute_ising_serial(ising);
    CHECK(c.value == d.value);
    CHECK(c.argmin == d.argmin);
  }
}

TEST_CASE("QUBO and Ising oracles agree through the conversion") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const QuboProblem qubo = test::random_qubo(10, seed * 3 + 1, 0.7);
    const IsingProblem ising = qubo_to_ising(qubo);
    const BruteResult bq = brute_qubo(qubo);
    const BruteResult bi = brute_ising(ising);
    CHECK(bq.value ==
          doctest::Approx(bi.value + ising.offset_carry).epsilon(1e-9));
    CHECK(ising_solution_to_qubo(bi.argmin) == bq.argmin);
  }
}

TEST_CASE("brute_ising respects the orientation flag") {
  IsingProblem zero;
  zero.c = Eigen::MatrixXd::Zero(4, 4);
  CHECK(brute_ising(zero).value == 0.0);

  const IsingProblem p = test::random_max_ising(8, 7);
  IsingProblem flipped = p;
  flipped.c = -p.c;
  flipped.orientation = Orientation::minimize;
  CHECK(brute_ising(p).value == doctest::Approx(-brute_ising(flipped).value));
}

TEST_CASE("brute_asp on forced and free splits") {
  AspInstance inst;
  inst.n_materials = 2;
  inst.affinity = Eigen::MatrixXd::Zero(2, 2);
  inst.affinity(0, 1) = inst.affinity(1, 0) = 0.5;

  inst.aisle_capacities = {2};
  CHECK(brute_asp(inst).value == 0.0);  // one aisle, nothing crosses

  inst.aisle_capacities = {1, 1};
  CHECK(brute_asp(inst).value == doctest::Approx(1.0));  // forced split
}

TEST_CASE("brute_asp agrees with the penalized QUBO oracle") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const AspInstance inst = generate_asp(seed + 80, 4, 2);
    const QuadraticModel model = build_asp_model(inst);
    const QuboProblem qubo = to_qubo(model, penalty_heuristic(model, 1.0));
    CHECK(brute_qubo(qubo).value ==
          doctest::Approx(brute_asp(inst).value).epsilon(1e-9));
  }
}

TEST_CASE("brute_asp optimum is invariant under relabelings") {
  const AspInstance inst = generate_asp(31, 6, 2);
  const double base = brute_asp(inst).value;

  AspInstance relabeled = inst;  // swap materials 0 and 1
  relabeled.affinity.row(0).swap(relabeled.affinity.row(1));
  relabeled.affinity.col(0).swap(relabeled.affinity.col(1));
  CHECK(brute_asp(relabeled).value == doctest::Approx(base));
}

TEST_CASE("brute_asp refuses combinatorial blowups with the count") {
  AspInstance inst;
  inst.n_materials = 20;
  inst.affinity = Eigen::MatrixXd::Zero(20, 20);
  inst.aisle_capacities = {7, 7, 6};
  CHECK_THROWS_WITH_AS(brute_asp(inst), doctest::Contains("10000000"),
                       std::invalid_argument);
}

TEST_CASE("brute_ovrp base cases") {
  OvrpInstance inst;
  inst.n_nodes = 2;
  inst.distance = Eigen::MatrixXd::Zero(2, 2);
  inst.distance(0, 1) = inst.distance(1, 0) = 4.0;
  inst.cost_per_dist = 2.0;
  inst.cost_per_stop = 1.0;
  inst.cost_fixed = 3.0;
  inst.maxstop = 2;
  inst.n_vehicles = 1;
  const OvrpBruteResult r = brute_ovrp(inst);
  CHECK(r.value == doctest::Approx(2.0 * 4.0 + 1.0 + 3.0));
  REQUIRE(r.solution.routes.size() == 1);
  CHECK(r.solution.routes[0] == std::vector<int>{1});
}

TEST_CASE("brute_ovrp honors maxstop = 1 by splitting routes") {
  OvrpInstance inst = generate_ovrp(2, 2, 1);
  const OvrpBruteResult r = brute_ovrp(inst);
  REQUIRE(r.solution.routes.size() == 2);
  const double expected = inst.cost_per_dist * (inst.distance(0, 1) + inst.distance(0, 2)) +
                          2.0 * inst.cost_per_stop + 2.0 * inst.cost_fixed;
  CHECK(r.value == doctest::Approx(expected));
}

TEST_CASE("brute_ovrp matches the route evaluator and the size cap") {
  const OvrpInstance inst = generate_ovrp(12, 6, 3);
  const OvrpBruteResult r = brute_ovrp(inst);
  CHECK(evaluate_ovrp(inst, r.solution) == doctest::Approx(r.value));
  CHECK_THROWS_AS(brute_ovrp(inst, 5), std::invalid_argument);
}

TEST_CASE("brute_ovrp agrees with the penalized QUBO oracle on 2 customers") {
  const OvrpInstance inst = generate_ovrp(77, 2, 3);
  const QuadraticModel model = build_ovrp_model(inst);
  const QuboProblem qubo = to_qubo(model, penalty_heuristic(model, 1.0));
  REQUIRE(qubo.size() <= 22);
  CHECK(brute_qubo(qubo, 22).value ==
        doctest::Approx(brute_ovrp(inst).value).epsilon(1e-9));
}

TEST_CASE("validate_solution lists violated constraints with residuals") {
  const AspInstance inst = generate_asp(4, 4, std::vector<int>{2, 2});
  const QuadraticModel model = build_asp_model(inst);

  const SlottingSolution ok{{0, 0, 1, 1}};
  CHECK(validate_solution(model, encode_slotting(model, inst, ok)).empty());

  // three materials into a two-slot aisle
  Eigen::VectorXd crowded = encode_slotting(model, inst, {{0, 0, 0, 1}});
  const auto violations = validate_solution(model, crowded);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].label == "capacity[0]");
  CHECK(violations[0].residual == doctest::Approx(1.0));
}

TEST_CASE("validate_solution flags double visits on the routing model") {
  const OvrpInstance inst = generate_ovrp(5, 2, 3);
  const QuadraticModel model = build_ovrp_model(inst);
  Eigen::VectorXd x = encode_routes(model, inst, {{{1, 2}}});
  // also drive into customer 2 from the depot with the same vehicle
  for (int v = 0; v < model.n_variables(); ++v)
    if (model.variables[v].name == "x[0,2,0]") x(v) = 1.0;
  bool visit_flagged = false;
  for (const auto& violation : validate_solution(model, x))
    if (violation.label == "visit[2]") visit_flagged = true;
  CHECK(visit_flagged);

  Eigen::VectorXd short_vec = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(validate_solution(model, short_vec), std::invalid_argument);
}

TEST_CASE("metrics populates the gap fields") {
  const BoundReport r = metrics(100.0, 90.0, 130.0);
  CHECK(*r.delta_abs_lower == doctest::Approx(10.0));
  CHECK(*r.delta_rel_lower == doctest::Approx(0.1));
  CHECK(*r.delta_abs_upper == doctest::Approx(30.0));
  CHECK(*r.delta_rel_upper == doctest::Approx(0.3));
  CHECK_FALSE(r.relative_undefined);

  const BoundReport tight = metrics(100.0, 100.0);
  CHECK(*tight.delta_abs_lower == 0.0);
  CHECK_FALSE(tight.delta_abs_upper.has_value());

  const BoundReport zero = metrics(0.0, -1.0, 1.0);
  CHECK(zero.relative_undefined);
  CHECK_FALSE(zero.delta_rel_lower.has_value());
  CHECK(*zero.delta_abs_lower == 1.0);
}

TEST_CASE("metrics arithmetic: delta_rel times z_star equals delta_abs") {
  SplitMix64 rng(6);
  for (int k = 0; k < 30; ++k) {
    const double z = 1.0 + 100.0 * rng.next_double();
    const double lower = z - 50.0 * rng.next_double();
    const BoundReport r = metrics(z, lower);
    CHECK(*r.delta_rel_lower * z == doctest::Approx(*r.delta_abs_lower).epsilon(1e-12));
  }
}

TEST_SUITE_END();
