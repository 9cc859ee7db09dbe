#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qsdp/encoding.hpp"
#include "qsdp/hu.hpp"

namespace qsdp {

// Squarefree +/-1 monomials up to the given degree, each a sorted list of
// variable indices (x_i^2 reduces to 1). Order is fixed: by degree, then
// lexicographic.
struct MonomialBasis {
  int n_variables = 0;
  int degree = 1;
  std::vector<std::vector<int>> monomials;

  int size() const { return static_cast<int>(monomials.size()); }
};
MonomialBasis monomial_basis(int n_variables, int degree);

// product of two squarefree monomials reduced mod x_i^2 = 1 (symmetric
// difference of the index sets)
std::vector<int> reduce_product(const std::vector<int>& a, const std::vector<int>& b);

struct SparseEntry {
  int row = 0;  // row <= col
  int col = 0;
  double value = 0.0;
};

// upper-triangle entries of a symmetric matrix; the mirrored element is
// implied, so <A, X> counts off-diagonal entries twice
struct SparseSymMatrix {
  int dim = 0;
  std::vector<SparseEntry> entries;

  double inner(const Eigen::MatrixXd& x) const;
};

// max <C, X> subject to <A_i, X> = b_i, X PSD; one dense block
struct MomentSdp {
  int dimension = 0;
  SparseSymMatrix objective;
  std::vector<SparseSymMatrix> constraint_matrices;
  std::vector<double> constraint_rhs;

  int n_constraints() const { return static_cast<int>(constraint_matrices.size()); }
};

// Unit-diagonal relaxation: objective is the cost matrix itself, one
// X_ii = 1 constraint per basis element (the pinned spin doubles as the
// constant monomial).
MomentSdp first_order_sdp(const IsingProblem& ising);

// Moment matrix over the degree-2 squarefree basis {1} u {x_i} u {x_i x_j}.
// Constraints fix the 1-entry to 1 and tie every pair of entries whose
// reduced monomials coincide; the objective embeds the cost matrix into the
// degree-<=2 moments. Refuses when the basis would exceed max_dimension.
MomentSdp second_order_sdp(const IsingProblem& ising, int max_dimension = 2048);

// Moment vector of a concrete spin assignment over the basis (entry u is
// the product of the assigned values in u); its outer product satisfies
// every constraint of the matching moment SDP exactly.
Eigen::VectorXd moment_vector(const MonomialBasis& basis, const Eigen::VectorXd& spins);

// Delegates a unit-diagonal SDP to the Hamiltonian-updates solver after
// verifying it has exactly that shape.
HuResult solve_first_order(const MomentSdp& sdp, const HuConfig& config);

// SDPA sparse format (one block): number of constraints, number of blocks,
// block size, right-hand sides, then "matno block i j value" lines with
// 1-based upper-triangle indices and matno 0 for the objective. Entries are
// sorted and printed with 17 significant digits, so identical inputs emit
// byte-identical files.
void emit_sdpa(const MomentSdp& sdp, const std::string& path);
std::string sdpa_string(const MomentSdp& sdp);
MomentSdp parse_sdpa(const std::string& path);

}  // namespace qsdp
