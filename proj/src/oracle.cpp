#include "qsdp/oracle.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qsdp {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::uint64_t pattern_of(const std::vector<char>& bits) {
  std::uint64_t p = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) p |= (1ULL << i);
  return p;
}

struct CubeBest {
  double value = 0.0;
  std::uint64_t pattern = 0;
  bool valid = false;

  // smaller value wins; equal values resolve to the smaller bit pattern
  void offer(double v, std::uint64_t p) {
    if (!valid || v < value || (v == value && p < pattern)) {
      value = v;
      pattern = p;
      valid = true;
    }
  }
  void merge(const CubeBest& other) {
    if (other.valid) offer(other.value, other.pattern);
  }
};

// Minimizes a quadratic set function over one sub-cube: the high bits stay
// at the prefix value, the low `n_free` bits run through a Gray code with
// O(n) incremental evaluation of the flip delta. The running value is
// re-anchored from scratch periodically so rounding drift stays bounded on
// long walks. eval_delta(k, bits) must return
// f(bits with bit k flipped) - f(bits).
template <typename DeltaFn, typename ValueFn>
CubeBest scan_subcube(int n_bits, int n_free, std::uint64_t prefix,
                      const ValueFn& value_of, const DeltaFn& eval_delta) {
  std::vector<char> bits(n_bits, 0);
  for (int i = n_free; i < n_bits; ++i)
    bits[i] = static_cast<char>((prefix >> (i - n_free)) & 1ULL);
  double value = value_of(bits);
  CubeBest best;
  best.offer(value, pattern_of(bits));
  const std::uint64_t steps = n_free >= 64 ? 0 : (1ULL << n_free);
  for (std::uint64_t t = 1; t < steps; ++t) {
    const int k = std::countr_zero(t);
    value += eval_delta(k, bits);
    bits[k] ^= 1;
    if ((t & 0xFFFFULL) == 0) value = value_of(bits);
    best.offer(value, pattern_of(bits));
  }
  return best;
}

// The serial variant runs the identical prefix partition without threads, so
// both produce bit-identical results for any worker count.
template <typename DeltaFn, typename ValueFn>
CubeBest scan_cube(int n_bits, bool parallel, const ValueFn& value_of,
                   const DeltaFn& eval_delta) {
  if (n_bits == 0) {
    std::vector<char> none;
    CubeBest best;
    best.offer(value_of(none), 0);
    return best;
  }
  const int prefix_bits = std::min(n_bits, 6);
  const int n_free = n_bits - prefix_bits;
  const int n_prefix = 1 << prefix_bits;
  std::vector<CubeBest> partial(n_prefix);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (int p = 0; p < n_prefix; ++p)
    partial[p] = scan_subcube(n_bits, n_free, static_cast<std::uint64_t>(p),
                              value_of, eval_delta);
  CubeBest best;
  for (const auto& b : partial) best.merge(b);
  return best;
}

BruteResult brute_qubo_impl(const QuboProblem& qubo, int max_bits, bool parallel) {
  const int n = qubo.size();
  if (n > max_bits) {
    std::ostringstream os;
    os << "QUBO has " << n << " bits, above the enumeration cap " << max_bits
       << "; raise the cap or fall back to sampling";
    throw std::invalid_argument(os.str());
  }
  const Eigen::MatrixXd& q = qubo.q;
  auto value_of = [&](const std::vector<char>& bits) {
    double v = qubo.offset;
    for (int i = 0; i < n; ++i) {
      if (!bits[i]) continue;
      v += q(i, i);
      for (int j = 0; j < i; ++j)
        if (bits[j]) v += q(i, j) + q(j, i);
    }
    return v;
  };
  auto eval_delta = [&](int k, const std::vector<char>& bits) {
    double cross = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != k && bits[j]) cross += q(k, j);
    const double sign = bits[k] ? -1.0 : 1.0;
    return sign * (q(k, k) + 2.0 * cross);
  };
  const CubeBest best = scan_cube(n, parallel, value_of, eval_delta);
  BruteResult result;
  result.value = best.value;
  result.argmin = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    result.argmin(i) = (best.pattern >> i) & 1ULL ? 1.0 : 0.0;
  return result;
}

BruteResult brute_ising_impl(const IsingProblem& ising, int max_bits, bool parallel) {
  const int dim = ising.dim();
  const int n = dim - 1;  // free spins; index 0 stays pinned at +1
  if (n > max_bits) {
    std::ostringstream os;
    os << "Ising problem has " << n << " free spins, above the enumeration cap "
       << max_bits << "; raise the cap or fall back to sampling";
    throw std::invalid_argument(os.str());
  }
  const Eigen::MatrixXd& c = ising.c;
  const double sense = ising.orientation == Orientation::maximize ? -1.0 : 1.0;
  // spin i+1 = +1 when bit i is set; value tracked as sense * objective so
  // the cube scan can always minimize
  auto spin = [](const std::vector<char>& bits, int node) {
    return node == 0 ? 1.0 : (bits[node - 1] ? 1.0 : -1.0);
  };
  auto value_of = [&](const std::vector<char>& bits) {
    double v = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) v += c(i, j) * spin(bits, i) * spin(bits, j);
    return sense * v;
  };
  auto eval_delta = [&](int k, const std::vector<char>& bits) {
    const int node = k + 1;
    double row = 0.0;
    for (int j = 0; j < dim; ++j)
      if (j != node) row += c(node, j) * spin(bits, j);
    return sense * (-4.0 * spin(bits, node) * row);
  };
  const CubeBest best = scan_cube(n, parallel, value_of, eval_delta);
  BruteResult result;
  result.value = sense * best.value;
  result.argmin = Eigen::VectorXd::Constant(dim, 1.0);
  for (int i = 0; i < n; ++i)
    result.argmin(i + 1) = (best.pattern >> i) & 1ULL ? 1.0 : -1.0;
  return result;
}

long count_assignments(int materials_left, std::vector<int> caps, long limit,
                       std::map<std::pair<int, std::vector<int>>, long>& memo) {
  if (materials_left == 0) return 1;
  std::sort(caps.begin(), caps.end());
  const auto key = std::make_pair(materials_left, caps);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  long total = 0;
  for (std::size_t j = 0; j < caps.size(); ++j) {
    if (caps[j] == 0) continue;
    if (j > 0 && caps[j] == caps[j - 1]) continue;  // identical residual caps
    // aisles with equal remaining capacity are interchangeable for counting
    int same = 0;
    for (std::size_t i = 0; i < caps.size(); ++i)
      if (caps[i] == caps[j]) ++same;
    auto next = caps;
    next[j] -= 1;
    const long sub = count_assignments(materials_left - 1, next, limit, memo);
    total += same * sub;
    if (total > limit) {
      total = limit + 1;
      break;
    }
  }
  memo[key] = total;
  return total;
}

}  // namespace

BruteResult brute_qubo(const QuboProblem& qubo, int max_bits) {
  return brute_qubo_impl(qubo, max_bits, true);
}
BruteResult brute_qubo_serial(const QuboProblem& qubo, int max_bits) {
  return brute_qubo_impl(qubo, max_bits, false);
}
BruteResult brute_ising(const IsingProblem& ising, int max_bits) {
  return brute_ising_impl(ising, max_bits, true);
}
BruteResult brute_ising_serial(const IsingProblem& ising, int max_bits) {
  return brute_ising_impl(ising, max_bits, false);
}

AspBruteResult brute_asp(const AspInstance& inst, long max_assignments) {
  inst.validate();
  const int m = inst.n_materials;
  const int k = inst.n_aisles();
  {
    std::map<std::pair<int, std::vector<int>>, long> memo;
    const long count =
        count_assignments(m, inst.aisle_capacities, max_assignments, memo);
    if (count > max_assignments) {
      std::ostringstream os;
      os << "more than " << max_assignments
         << " capacity-feasible assignments; refusing exhaustive search";
      throw std::invalid_argument(os.str());
    }
  }

  std::vector<int> assignment(m, -1);
  std::vector<int> remaining = inst.aisle_capacities;
  // in_aisle(mat, j): affinity mass between mat and the materials already
  // placed in aisle j; placing into j costs twice the mass placed elsewhere
  Eigen::MatrixXd in_aisle = Eigen::MatrixXd::Zero(m, k);
  AspBruteResult best;
  best.value = std::numeric_limits<double>::infinity();

  auto place = [&](auto&& self, int mat, double cost) -> void {
    if (cost >= best.value) return;  // affinity is nonnegative, cost only grows
    if (mat == m) {
      best.value = cost;
      best.solution.assignment = assignment;
      return;
    }
    for (int j = 0; j < k; ++j) {
      if (remaining[j] == 0) continue;
      const double added = 2.0 * (in_aisle.row(mat).sum() - in_aisle(mat, j));
      assignment[mat] = j;
      remaining[j] -= 1;
      for (int other = mat + 1; other < m; ++other)
        in_aisle(other, j) += inst.affinity(other, mat);
      self(self, mat + 1, cost + added);
      for (int other = mat + 1; other < m; ++other)
        in_aisle(other, j) -= inst.affinity(other, mat);
      remaining[j] += 1;
      assignment[mat] = -1;
    }
  };
  place(place, 0, 0.0);
  return best;
}

OvrpBruteResult brute_ovrp(const OvrpInstance& inst, int max_customers) {
  inst.validate();
  const int n = inst.n_customers();
  if (n > max_customers) {
    std::ostringstream os;
    os << "OVRP has " << n << " customers, above the enumeration cap "
       << max_customers;
    throw std::invalid_argument(os.str());
  }

  // cheapest open path from the depot through each customer subset
  const int n_masks = 1 << n;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> dp(n_masks, std::vector<double>(n, inf));
  std::vector<std::vector<int>> parent(n_masks, std::vector<int>(n, -1));
  for (int c = 0; c < n; ++c) dp[1 << c][c] = inst.distance(0, c + 1);
  for (int mask = 1; mask < n_masks; ++mask)
    for (int last = 0; last < n; ++last) {
      if (!(mask & (1 << last)) || dp[mask][last] == inf) continue;
      for (int next = 0; next < n; ++next) {
        if (mask & (1 << next)) continue;
        const int nmask = mask | (1 << next);
        const double cand = dp[mask][last] + inst.distance(last + 1, next + 1);
        if (cand < dp[nmask][next]) {
          dp[nmask][next] = cand;
          parent[nmask][next] = last;
        }
      }
    }
  std::vector<double> best_path(n_masks, inf);
  std::vector<int> best_last(n_masks, -1);
  best_path[0] = 0.0;
  for (int mask = 1; mask < n_masks; ++mask)
    for (int last = 0; last < n; ++last)
      if (dp[mask][last] < best_path[mask]) {
        best_path[mask] = dp[mask][last];
        best_last[mask] = last;
      }
  auto route_of = [&](int mask) {
    std::vector<int> route;
    int last = best_last[mask];
    while (last >= 0) {
      route.push_back(last + 1);
      const int pmask = mask & ~(1 << last);
      last = parent[mask][last];
      mask = pmask;
    }
    std::reverse(route.begin(), route.end());
    return route;
  };

  // partition the customer set into at most n_vehicles blocks of size
  // <= maxstop; always peel the block containing the lowest remaining
  // customer so each partition is enumerated once
  OvrpBruteResult best;
  best.value = inf;
  std::vector<int> blocks;
  auto recurse = [&](auto&& self, int remaining_mask, int vehicles_left,
                     double cost) -> void {
    if (cost >= best.value) return;
    if (remaining_mask == 0) {
      best.value = cost;
      best.solution.routes.clear();
      for (int b : blocks) best.solution.routes.push_back(route_of(b));
      return;
    }
    if (vehicles_left == 0) return;
    const int lowest = remaining_mask & -remaining_mask;
    const int rest = remaining_mask & ~lowest;
    // all subsets of rest, combined with the lowest remaining customer
    for (int sub = rest;; sub = (sub - 1) & rest) {
      const int block = sub | lowest;
      if (std::popcount(static_cast<unsigned>(block)) <= inst.maxstop) {
        const double block_cost = inst.cost_per_dist * best_path[block] +
                                  inst.cost_per_stop * std::popcount(static_cast<unsigned>(block)) +
                                  inst.cost_fixed;
        blocks.push_back(block);
        self(self, remaining_mask & ~block, vehicles_left - 1, cost + block_cost);
        blocks.pop_back();
      }
      if (sub == 0) break;
    }
  };
  recurse(recurse, n_masks - 1, inst.n_vehicles, 0.0);
  return best;
}

std::vector<Violation> validate_solution(const QuadraticModel& model,
                                         const Eigen::VectorXd& assignment) {
  model.validate();
  require(assignment.size() == model.n_variables(),
          "assignment must cover every model variable");
  constexpr double tol = 1e-9;
  std::vector<Violation> out;
  for (int i = 0; i < model.n_variables(); ++i) {
    const auto& v = model.variables[i];
    const double x = assignment(i);
    if (std::abs(x - std::round(x)) > tol)
      out.push_back({"integrality[" + v.name + "]", std::abs(x - std::round(x))});
    if (x < static_cast<double>(v.lower) - tol)
      out.push_back({"bound[" + v.name + "]", static_cast<double>(v.lower) - x});
    if (x > static_cast<double>(v.upper) + tol)
      out.push_back({"bound[" + v.name + "]", x - static_cast<double>(v.upper)});
  }
  for (const auto& con : model.eq_constraints) {
    const double r = con.coeffs.dot(assignment) - static_cast<double>(con.rhs);
    if (std::abs(r) > tol) out.push_back({con.label, std::abs(r)});
  }
  for (const auto& con : model.ineq_constraints) {
    const double r = con.coeffs.dot(assignment) - static_cast<double>(con.rhs);
    if (r > tol) out.push_back({con.label, r});
  }
  return out;
}

BoundReport metrics(double z_star, double lower, std::optional<double> upper) {
  BoundReport report;
  report.z_star = z_star;
  report.lower_bound = lower;
  report.upper_bound = upper;
  report.delta_abs_lower = std::abs(lower - z_star);
  if (upper) report.delta_abs_upper = std::abs(*upper - z_star);
  if (z_star != 0.0) {
    report.delta_rel_lower = *report.delta_abs_lower / z_star;
    if (upper) report.delta_rel_upper = *report.delta_abs_upper / z_star;
  } else {
    report.relative_undefined = true;
  }
  return report;
}

}  // namespace qsdp
