#include "qsdp/lasserre.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qsdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void sort_entries(SparseSymMatrix& m) {
  std::sort(m.entries.begin(), m.entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.row, a.col) < std::tie(b.row, b.col);
  });
}

}  // namespace

double SparseSymMatrix::inner(const Eigen::MatrixXd& x) const {
  double total = 0.0;
  for (const auto& e : entries) {
    total += e.value * x(e.row, e.col);
    if (e.row != e.col) total += e.value * x(e.col, e.row);
  }
  return total;
}

MonomialBasis monomial_basis(int n_variables, int degree) {
  require(n_variables >= 1, "need at least one variable");
  require(degree == 1 || degree == 2, "only degrees 1 and 2 are supported");
  MonomialBasis basis;
  basis.n_variables = n_variables;
  basis.degree = degree;
  basis.monomials.push_back({});
  for (int i = 0; i < n_variables; ++i) basis.monomials.push_back({i});
  if (degree == 2)
    for (int i = 0; i < n_variables; ++i)
      for (int j = i + 1; j < n_variables; ++j) basis.monomials.push_back({i, j});
  return basis;
}

std::vector<int> reduce_product(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

MomentSdp first_order_sdp(const IsingProblem& ising) {
  require(ising.orientation == Orientation::maximize,
          "relaxation expects max orientation");
  const int dim = ising.dim();
  MomentSdp sdp;
  sdp.dimension = dim;
  sdp.objective.dim = dim;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j)
      if (ising.c(i, j) != 0.0) sdp.objective.entries.push_back({i, j, ising.c(i, j)});
  for (int i = 0; i < dim; ++i) {
    SparseSymMatrix a;
    a.dim = dim;
    a.entries.push_back({i, i, 1.0});
    sdp.constraint_matrices.push_back(std::move(a));
    sdp.constraint_rhs.push_back(1.0);
  }
  return sdp;
}

MomentSdp second_order_sdp(const IsingProblem& ising, int max_dimension) {
  require(ising.orientation == Orientation::maximize,
          "relaxation expects max orientation");
  const int n = ising.dim() - 1;  // free spins; the pin is the constant monomial
  require(n >= 1, "need at least one free spin");
  const long dim = 1L + n + static_cast<long>(n) * (n - 1) / 2;
  if (dim > max_dimension) {
    std::ostringstream os;
    os << "order-2 basis of dimension 1 + n + n(n-1)/2 = " << dim << " for n = " << n
       << " exceeds the cap " << max_dimension;
    throw std::invalid_argument(os.str());
  }
  const MonomialBasis basis = monomial_basis(n, 2);

  MomentSdp sdp;
  sdp.dimension = basis.size();
  sdp.objective.dim = basis.size();
  // cost entries land on the lowest-degree moment holding each monomial:
  // constant terms at (0,0), x_j at (0, column of x_j), x_i x_j at
  // (row of x_i, column of x_j)
  double constant = ising.c(0, 0);
  for (int i = 1; i <= n; ++i) constant += ising.c(i, i);
  if (constant != 0.0) sdp.objective.entries.push_back({0, 0, constant});
  for (int j = 1; j <= n; ++j)
    if (ising.c(0, j) != 0.0) sdp.objective.entries.push_back({0, j, ising.c(0, j)});
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (ising.c(i, j) != 0.0) sdp.objective.entries.push_back({i, j, ising.c(i, j)});
  sort_entries(sdp.objective);

  // group the upper-triangle moment-matrix cells by their reduced monomial
  std::map<std::vector<int>, std::vector<std::pair<int, int>>> classes;
  for (int u = 0; u < basis.size(); ++u)
    for (int v = u; v < basis.size(); ++v)
      classes[reduce_product(basis.monomials[u], basis.monomials[v])].emplace_back(u, v);

  // the empty monomial is the constant 1; its representative cell is (0,0)
  {
    SparseSymMatrix a;
    a.dim = basis.size();
    a.entries.push_back({0, 0, 1.0});
    sdp.constraint_matrices.push_back(std::move(a));
    sdp.constraint_rhs.push_back(1.0);
  }
  for (const auto& [monomial, cells] : classes) {
    const auto [ru, rv] = cells.front();
    const double rep_coeff = ru == rv ? 1.0 : 0.5;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const auto [u, v] = cells[i];
      SparseSymMatrix a;
      a.dim = basis.size();
      a.entries.push_back({u, v, u == v ? 1.0 : 0.5});
      a.entries.push_back({ru, rv, -rep_coeff});
      sort_entries(a);
      sdp.constraint_matrices.push_back(std::move(a));
      sdp.constraint_rhs.push_back(0.0);
    }
  }
  return sdp;
}

Eigen::VectorXd moment_vector(const MonomialBasis& basis, const Eigen::VectorXd& spins) {
  require(spins.size() == basis.n_variables, "spin vector size mismatch");
  Eigen::VectorXd m(basis.size());
  for (int u = 0; u < basis.size(); ++u) {
    double prod = 1.0;
    for (int var : basis.monomials[u]) prod *= spins(var);
    m(u) = prod;
  }
  return m;
}

HuResult solve_first_order(const MomentSdp& sdp, const HuConfig& config) {
  require(sdp.n_constraints() == sdp.dimension,
          "not a unit-diagonal SDP: constraint count differs from dimension");
  std::vector<bool> seen(sdp.dimension, false);
  for (int i = 0; i < sdp.n_constraints(); ++i) {
    const auto& a = sdp.constraint_matrices[i];
    require(a.entries.size() == 1 && a.entries[0].row == a.entries[0].col &&
                a.entries[0].value == 1.0 && sdp.constraint_rhs[i] == 1.0,
            "not a unit-diagonal SDP: unexpected constraint shape");
    seen[a.entries[0].row] = true;
  }
  for (bool s : seen) require(s, "not a unit-diagonal SDP: missing diagonal index");

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(sdp.dimension, sdp.dimension);
  for (const auto& e : sdp.objective.entries) {
    c(e.row, e.col) = e.value;
    c(e.col, e.row) = e.value;
  }
  return hu_solve(c, config);
}

std::string sdpa_string(const MomentSdp& sdp) {
  require(sdp.dimension >= 1, "empty SDP");
  require(sdp.constraint_rhs.size() == sdp.constraint_matrices.size(),
          "constraint sides out of sync");
  std::ostringstream out;
  out << sdp.n_constraints() << "\n1\n" << sdp.dimension << "\n";
  for (int i = 0; i < sdp.n_constraints(); ++i)
    out << (i ? " " : "") << fmt_double(sdp.constraint_rhs[i]);
  out << "\n";
  auto write_matrix = [&](int matno, const SparseSymMatrix& m) {
    SparseSymMatrix sorted = m;
    sort_entries(sorted);
    for (const auto& e : sorted.entries) {
      if (e.value == 0.0) continue;
      out << matno << " 1 " << e.row + 1 << " " << e.col + 1 << " "
          << fmt_double(e.value) << "\n";
    }
  };
  write_matrix(0, sdp.objective);
  for (int i = 0; i < sdp.n_constraints(); ++i)
    write_matrix(i + 1, sdp.constraint_matrices[i]);
  return out.str();
}

void emit_sdpa(const MomentSdp& sdp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write SDPA file: " + path);
  out << sdpa_string(sdp);
}

MomentSdp parse_sdpa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open SDPA file: " + path);
  int m = 0, blocks = 0, dim = 0;
  in >> m >> blocks >> dim;
  require(in.good() && m >= 0 && dim >= 1, "malformed SDPA header");
  require(blocks == 1, "only single-block SDPA files are supported");
  MomentSdp sdp;
  sdp.dimension = dim;
  sdp.objective.dim = dim;
  sdp.constraint_matrices.assign(m, SparseSymMatrix{dim, {}});
  sdp.constraint_rhs.assign(m, 0.0);
  for (int i = 0; i < m; ++i) in >> sdp.constraint_rhs[i];
  int matno, block, row, col;
  double value;
  while (in >> matno >> block >> row >> col >> value) {
    require(matno >= 0 && matno <= m, "entry references unknown matrix");
    require(block == 1, "entry references unknown block");
    require(row >= 1 && row <= col && col <= dim, "entry indices out of range");
    SparseSymMatrix& target =
        matno == 0 ? sdp.objective : sdp.constraint_matrices[matno - 1];
    target.entries.push_back({row - 1, col - 1, value});
  }
  return sdp;
}

}  // namespace qsdp
