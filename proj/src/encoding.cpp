#include "qsdp/encoding.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qsdp {

double IsingProblem::objective(const Eigen::VectorXd& x) const {
  return x.dot(c * x);
}

IsingProblem qubo_to_ising(const QuboProblem& qubo) {
  const int n = qubo.size();
  IsingProblem ising;
  ising.c = Eigen::MatrixXd::Zero(n + 1, n + 1);
  ising.c(0, 0) = 0.25 * qubo.q.sum();
  for (int j = 0; j < n; ++j) {
    const double colsum = 0.25 * qubo.q.col(j).sum();
    ising.c(0, j + 1) = colsum;
    ising.c(j + 1, 0) = colsum;
  }
  ising.c.block(1, 1, n, n) = 0.25 * qubo.q;
  ising.orientation = Orientation::minimize;
  ising.offset_carry = qubo.offset;
  return ising;
}

Eigen::VectorXd ising_solution_to_qubo(const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x(i) != 1.0 && x(i) != -1.0)
      throw std::invalid_argument("spin vector entries must be +1 or -1");
  if (x.size() == 0) throw std::invalid_argument("empty spin vector");
  const double flip = x(0);  // x(0) == -1 means the mirrored solution
  Eigen::VectorXd b(x.size() - 1);
  for (Eigen::Index i = 1; i < x.size(); ++i) b(i - 1) = (flip * x(i) + 1.0) / 2.0;
  return b;
}

Eigen::VectorXd qubo_solution_to_ising(const Eigen::VectorXd& bits) {
  Eigen::VectorXd x(bits.size() + 1);
  x(0) = 1.0;
  for (Eigen::Index i = 0; i < bits.size(); ++i) {
    if (bits(i) != 0.0 && bits(i) != 1.0)
      throw std::invalid_argument("bit vector entries must be 0 or 1");
    x(i + 1) = 2.0 * bits(i) - 1.0;
  }
  return x;
}

IsingProblem orient_for_maximization(const IsingProblem& p) {
  if (p.orientation != Orientation::minimize)
    throw std::invalid_argument("problem is already in max orientation");
  IsingProblem out;
  out.c = -p.c;
  out.orientation = Orientation::maximize;
  out.offset_carry = p.offset_carry;
  return out;
}

IsingProblem fold_diagonal(const IsingProblem& p) {
  IsingProblem out = p;
  const double trace = p.c.trace();
  out.c.diagonal().setZero();
  const double sign = p.orientation == Orientation::minimize ? 1.0 : -1.0;
  out.offset_carry += sign * trace;
  return out;
}

void save_ising(const IsingProblem& p, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write Ising file: " + path);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", p.offset_carry);
  out << p.dim() << " " << buf << " pinned=0:+1 "
      << (p.orientation == Orientation::minimize ? "min" : "max") << "\n";
  for (int i = 0; i < p.dim(); ++i)
    for (int j = i; j < p.dim(); ++j) {
      const double v = i == j ? p.c(i, i) : p.c(i, j) + p.c(j, i);
      if (v != 0.0) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << i << " " << j << " " << buf << "\n";
      }
    }
}

}  // namespace qsdp
