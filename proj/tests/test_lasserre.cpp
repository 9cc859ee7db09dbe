#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "qsdp/lasserre.hpp"
#include "qsdp/oracle.hpp"

using namespace qsdp;

namespace {

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

// outer product of the moment vector of a spin assignment
Eigen::MatrixXd moment_outer(const MonomialBasis& basis, const Eigen::VectorXd& spins) {
  const Eigen::VectorXd m = moment_vector(basis, spins);
  return m * m.transpose();
}

}  // namespace

TEST_SUITE_BEGIN("lasserre");

TEST_CASE("monomial basis sizes") {
  CHECK(monomial_basis(3, 1).size() == 4);
  CHECK(monomial_basis(3, 2).size() == 7);   // 1 + 3 + 3
  CHECK(monomial_basis(10, 2).size() == 56);  // 1 + 10 + 45
}

TEST_CASE("reduce_product cancels squares") {
  CHECK(reduce_product({0, 1}, {1, 2}) == std::vector<int>{0, 2});
  CHECK(reduce_product({0}, {0}) == std::vector<int>{});
  CHECK(reduce_product({}, {4}) == std::vector<int>{4});
}

TEST_CASE("first-order relaxation is the unit-diagonal SDP") {
  const IsingProblem ising =
      orient_for_maximization(qubo_to_ising(test::random_qubo(2, 5)));
  const MomentSdp sdp = first_order_sdp(ising);
  CHECK(sdp.dimension == 3);
  CHECK(sdp.n_constraints() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(sdp.constraint_rhs[i] == 1.0);
    CHECK(sdp.constraint_matrices[i].entries.size() == 1);
    CHECK(sdp.constraint_matrices[i].entries[0].row == i);
    CHECK(sdp.constraint_matrices[i].entries[0].col == i);
  }
}

TEST_CASE("first-order delegation reproduces the solver's own bound") {
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  IsingProblem ising;
  ising.c = swap;
  ising.orientation = Orientation::maximize;
  HuConfig config;
  config.epsilon = 1e-2;
  const HuResult direct = hu_solve(swap, config);
  const HuResult delegated = solve_first_order(first_order_sdp(ising), config);
  CHECK(delegated.gamma_high == direct.gamma_high);
  CHECK(delegated.gamma_low == direct.gamma_low);
  // analytic optimum of the one-parameter SDP
  CHECK(direct.gamma_low <= 2.0 + 1e-9);
  CHECK(direct.gamma_high >= 2.0 - 1e-9);
}

TEST_CASE("delegated order-1 bound covers the exact optimum with certified slack") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const IsingProblem ising = test::random_max_ising(7, 600 + seed);
    HuConfig config;
    config.epsilon = 1e-2;
    config.bisection_tolerance = 4.0;
    const HuResult r = solve_first_order(first_order_sdp(ising), config);
    const double slack = config.epsilon * ising.dim() * operator_norm(ising.c);
    CHECK(brute_ising(ising).value <= r.gamma_high + slack + 1e-9);
  }
}

TEST_CASE("solve_first_order rejects non-unit-diagonal SDPs") {
  const IsingProblem ising = test::random_max_ising(4, 3);
  MomentSdp sdp = second_order_sdp(ising);
  CHECK_THROWS_WITH_AS(solve_first_order(sdp, HuConfig{}),
                       doctest::Contains("unit-diagonal"), std::invalid_argument);
}

TEST_CASE("second-order dimensions and the size guard") {
  CHECK(second_order_sdp(test::random_max_ising(4, 1)).dimension == 7);
  CHECK(second_order_sdp(test::random_max_ising(11, 1)).dimension == 56);
  CHECK_THROWS_WITH_AS(second_order_sdp(test::random_max_ising(11, 1), 20),
                       doctest::Contains("1 + n + n(n-1)/2"), std::invalid_argument);
}

TEST_CASE("moment matrices of spin assignments satisfy every constraint exactly") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int n = 3 + static_cast<int>(seed);
    const IsingProblem ising = test::random_max_ising(n + 1, 200 + seed);
    const MomentSdp sdp = second_order_sdp(ising);
    const MonomialBasis basis = monomial_basis(n, 2);

    const BruteResult opt = brute_ising(ising);
    const Eigen::VectorXd spins = opt.argmin.tail(n);
    const Eigen::MatrixXd x = moment_outer(basis, spins);
    for (int i = 0; i < sdp.n_constraints(); ++i)
      CHECK(sdp.constraint_matrices[i].inner(x) == sdp.constraint_rhs[i]);
    // the relaxation prices the assignment at its true objective
    CHECK(sdp.objective.inner(x) == doctest::Approx(opt.value).epsilon(1e-12));

    // first-order moment matrix: the plain spin outer product with the pin
    const MomentSdp first = first_order_sdp(ising);
    const Eigen::MatrixXd x1 = opt.argmin * opt.argmin.transpose();
    for (int i = 0; i < first.n_constraints(); ++i)
      CHECK(first.constraint_matrices[i].inner(x1) == first.constraint_rhs[i]);
    CHECK(first.objective.inner(x1) == doctest::Approx(opt.value).epsilon(1e-12));
  }
}

TEST_CASE("SDPA output matches the documented header layout") {
  const IsingProblem ising =
      orient_for_maximization(qubo_to_ising(test::random_qubo(2, 5)));
  const std::string text = sdpa_string(first_order_sdp(ising));
  CHECK(text.rfind("3\n1\n3\n1 1 1\n", 0) == 0);
}

TEST_CASE("empty objectives emit no objective lines") {
  IsingProblem zero;
  zero.c = Eigen::MatrixXd::Zero(3, 3);
  zero.orientation = Orientation::maximize;
  const std::string text = sdpa_string(first_order_sdp(zero));
  CHECK(text.find("\n0 1 ") == std::string::npos);
}

TEST_CASE("emit, parse, re-emit is byte-stable") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "qsdp-sdpa-test";
  fs::create_directories(dir);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const IsingProblem ising = test::random_max_ising(5, 300 + seed);
    for (int order = 1; order <= 2; ++order) {
      const MomentSdp sdp =
          order == 1 ? first_order_sdp(ising) : second_order_sdp(ising);
      const auto p1 = (dir / ("o" + std::to_string(order) + ".dat-s")).string();
      const auto p2 = (dir / ("o" + std::to_string(order) + "-again.dat-s")).string();
      emit_sdpa(sdp, p1);
      emit_sdpa(sdp, p1);  // deterministic overwrite
      const MomentSdp parsed = parse_sdpa(p1);
      CHECK(parsed.dimension == sdp.dimension);
      CHECK(parsed.n_constraints() == sdp.n_constraints());
      emit_sdpa(parsed, p2);
      CHECK(file_bytes(p1) == file_bytes(p2));
    }
  }
}

TEST_SUITE_END();
