#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "qsdp/encoding.hpp"
#include "qsdp/reformulate.hpp"
#include "qsdp/rng.hpp"

namespace qsdp::test {

inline Eigen::MatrixXd random_symmetric(int n, std::uint64_t seed,
                                        double lo = -1.0, double hi = 1.0) {
  SplitMix64 rng(seed);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = lo + (hi - lo) * rng.next_double();
      m(i, j) = v;
      m(j, i) = v;
    }
  return m;
}

inline QuboProblem random_qubo(int n, std::uint64_t seed, double offset = 0.0) {
  QuboProblem qubo;
  qubo.q = random_symmetric(n, seed);
  qubo.offset = offset;
  return qubo;
}

inline IsingProblem random_max_ising(int dim, std::uint64_t seed) {
  IsingProblem p;
  p.c = random_symmetric(dim, seed);
  p.orientation = Orientation::maximize;
  return p;
}

inline Eigen::VectorXd random_bits(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = rng.next_below(2) ? 1.0 : 0.0;
  return b;
}

}  // namespace qsdp::test
