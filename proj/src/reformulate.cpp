#include "qsdp/reformulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

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

// value = constant + sum of weight * bit over terms
struct AffineBits {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;
};

// Collects quadratic pseudo-boolean coefficients into a symmetric QUBO
// matrix; b^2 = b folds squares onto the diagonal.
class QuboAccumulator {
 public:
  explicit QuboAccumulator(int n_bits)
      : q_(Eigen::MatrixXd::Zero(n_bits, n_bits)), offset_(0.0) {}

  void add_constant(double c) { offset_ += c; }
  void add_linear(int bit, double c) { q_(bit, bit) += c; }

  void add_bilinear(int a, int b, double c) {
    if (a == b) {
      q_(a, a) += c;
    } else {
      q_(a, b) += 0.5 * c;
      q_(b, a) += 0.5 * c;
    }
  }

  // adds weight * (residual)^2 for an affine residual
  void add_square(const AffineBits& r, double weight) {
    offset_ += weight * r.constant * r.constant;
    for (const auto& [bit, w] : r.terms)
      q_(bit, bit) += weight * (2.0 * r.constant * w + w * w);
    for (std::size_t a = 0; a < r.terms.size(); ++a)
      for (std::size_t b = a + 1; b < r.terms.size(); ++b) {
        const double c = 2.0 * weight * r.terms[a].second * r.terms[b].second;
        add_bilinear(r.terms[a].first, r.terms[b].first, c);
      }
  }

  // adds weight * A * B for two affine forms
  void add_product(const AffineBits& lhs, const AffineBits& rhs, double weight) {
    offset_ += weight * lhs.constant * rhs.constant;
    for (const auto& [bit, w] : lhs.terms) add_linear(bit, weight * w * rhs.constant);
    for (const auto& [bit, w] : rhs.terms) add_linear(bit, weight * lhs.constant * w);
    for (const auto& [ba, wa] : lhs.terms)
      for (const auto& [bb, wb] : rhs.terms) add_bilinear(ba, bb, weight * wa * wb);
  }

  Eigen::MatrixXd take_q() { return std::move(q_); }
  double offset() const { return offset_; }

 private:
  Eigen::MatrixXd q_;
  double offset_;
};

}  // namespace

double QuadraticModel::objective_value(const Eigen::VectorXd& x) const {
  return objective_constant + linear.dot(x) + x.dot(quadratic * x);
}

void QuadraticModel::validate() const {
  const int n = n_variables();
  for (const auto& v : variables)
    require(v.lower <= v.upper, "variable " + v.name + " has empty bounds");
  require(linear.size() == n, "linear coefficient vector size mismatch");
  require(quadratic.rows() == n && quadratic.cols() == n,
          "quadratic coefficient matrix size mismatch");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j)
      require(quadratic(i, j) == quadratic(j, i), "quadratic matrix must be symmetric");
  for (const auto& c : eq_constraints)
    require(c.coeffs.size() == n, "constraint " + c.label + " size mismatch");
  for (const auto& c : ineq_constraints)
    require(c.coeffs.size() == n, "constraint " + c.label + " size mismatch");
}

double QuboProblem::value(const Eigen::VectorXd& bits) const {
  return offset + bits.dot(q * bits);
}

std::vector<long> slack_coefficients(long bound) {
  require(bound >= 1, "slack bound must be at least 1");
  std::vector<long> coeffs;
  long r = 0;
  while ((1L << (r + 1)) <= bound) ++r;
  for (long s = 0; s < r; ++s) coeffs.push_back(1L << s);
  coeffs.push_back(bound - ((1L << r) - 1));
  return coeffs;
}

QuadraticModel build_asp_model(const AspInstance& inst, bool drop_zero_affinity) {
  inst.validate();
  const int k = inst.n_aisles();

  std::vector<int> materials;
  for (int m = 0; m < inst.n_materials; ++m) {
    if (drop_zero_affinity && inst.affinity.row(m).cwiseAbs().sum() == 0.0) continue;
    materials.push_back(m);
  }
  const int mm = static_cast<int>(materials.size());
  require(mm >= 1, "presolve removed every material");

  QuadraticModel model;
  const int n = mm * k;
  model.variables.reserve(n);
  auto var = [&](int mi, int j) { return mi * k + j; };
  for (int mi = 0; mi < mm; ++mi)
    for (int j = 0; j < k; ++j) {
      std::ostringstream name;
      name << "x[" << materials[mi] << "," << j << "]";
      model.variables.push_back({name.str(), 0, 1});
    }

  model.linear = Eigen::VectorXd::Zero(n);
  model.quadratic = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < mm; ++a)
    for (int b = 0; b < mm; ++b) {
      if (a == b) continue;
      const double sigma = inst.affinity(materials[a], materials[b]);
      if (sigma == 0.0) continue;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          if (i != j) model.quadratic(var(a, i), var(b, j)) = sigma;
    }

  for (int mi = 0; mi < mm; ++mi) {
    LinearConstraint c;
    std::ostringstream label;
    label << "assign[" << materials[mi] << "]";
    c.label = label.str();
    c.coeffs = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < k; ++j) c.coeffs(var(mi, j)) = 1.0;
    c.rhs = 1;
    model.eq_constraints.push_back(std::move(c));
  }
  for (int j = 0; j < k; ++j) {
    LinearConstraint c;
    std::ostringstream label;
    label << "capacity[" << j << "]";
    c.label = label.str();
    c.coeffs = Eigen::VectorXd::Zero(n);
    for (int mi = 0; mi < mm; ++mi) c.coeffs(var(mi, j)) = 1.0;
    c.rhs = inst.aisle_capacities[j];
    model.ineq_constraints.push_back(std::move(c));
  }
  model.validate();
  return model;
}

QuadraticModel build_ovrp_model(const OvrpInstance& inst) {
  inst.validate();
  const int nv = inst.n_nodes;
  const int n_cust = inst.n_customers();
  const int kk = inst.n_vehicles;

  QuadraticModel model;
  // arc binaries x[i,j,k] for i != j, then visit orders u[1..n_cust]
  std::vector<std::vector<std::vector<int>>> x(
      nv, std::vector<std::vector<int>>(nv, std::vector<int>(kk, -1)));
  int idx = 0;
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      if (i == j) continue;
      for (int k = 0; k < kk; ++k) {
        std::ostringstream name;
        name << "x[" << i << "," << j << "," << k << "]";
        model.variables.push_back({name.str(), 0, 1});
        x[i][j][k] = idx++;
      }
    }
  std::vector<int> u(nv, -1);
  for (int j = 1; j < nv; ++j) {
    std::ostringstream name;
    name << "u[" << j << "]";
    model.variables.push_back({name.str(), 1, n_cust});
    u[j] = idx++;
  }
  const int n = idx;

  model.linear = Eigen::VectorXd::Zero(n);
  model.quadratic = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      if (i == j) continue;
      for (int k = 0; k < kk; ++k) {
        double c = inst.cost_per_dist * inst.distance(i, j);
        if (j != 0) c += inst.cost_per_stop;
        if (i == 0 && j != 0) c += inst.cost_fixed;
        model.linear(x[i][j][k]) += c;
      }
    }

  // each customer entered exactly once
  for (int j = 1; j < nv; ++j) {
    LinearConstraint c;
    c.label = "visit[" + std::to_string(j) + "]";
    c.coeffs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < nv; ++i)
      if (i != j)
        for (int k = 0; k < kk; ++k) c.coeffs(x[i][j][k]) = 1.0;
    c.rhs = 1;
    model.eq_constraints.push_back(std::move(c));
  }
  // each customer left at most once (arcs back to the depot do not count)
  for (int i = 1; i < nv; ++i) {
    LinearConstraint c;
    c.label = "leave[" + std::to_string(i) + "]";
    c.coeffs = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < nv; ++j)
      if (i != j)
        for (int k = 0; k < kk; ++k) c.coeffs(x[i][j][k]) = 1.0;
    c.rhs = 1;
    model.ineq_constraints.push_back(std::move(c));
  }
  // customers cannot act as sources: out-degree (to customers) <= in-degree
  for (int k = 0; k < kk; ++k)
    for (int j = 1; j < nv; ++j) {
      LinearConstraint c;
      c.label = "flow[" + std::to_string(k) + "," + std::to_string(j) + "]";
      c.coeffs = Eigen::VectorXd::Zero(n);
      for (int i = 1; i < nv; ++i)
        if (i != j) c.coeffs(x[j][i][k]) += 1.0;
      for (int i = 0; i < nv; ++i)
        if (i != j) c.coeffs(x[i][j][k]) -= 1.0;
      c.rhs = 0;
      model.ineq_constraints.push_back(std::move(c));
    }
  // subtour elimination: u_i - u_j + n * sum_k x[i,j,k] <= n - 1
  for (int i = 1; i < nv; ++i)
    for (int j = 1; j < nv; ++j) {
      if (i == j) continue;
      LinearConstraint c;
      c.label = "order[" + std::to_string(i) + "," + std::to_string(j) + "]";
      c.coeffs = Eigen::VectorXd::Zero(n);
      c.coeffs(u[i]) = 1.0;
      c.coeffs(u[j]) = -1.0;
      for (int k = 0; k < kk; ++k) c.coeffs(x[i][j][k]) = static_cast<double>(n_cust);
      c.rhs = n_cust - 1;
      model.ineq_constraints.push_back(std::move(c));
    }
  // one depot departure per vehicle, so vehicles and open routes coincide
  for (int k = 0; k < kk; ++k) {
    LinearConstraint c;
    c.label = "depart[" + std::to_string(k) + "]";
    c.coeffs = Eigen::VectorXd::Zero(n);
    for (int j = 1; j < nv; ++j) c.coeffs(x[0][j][k]) = 1.0;
    c.rhs = 1;
    model.ineq_constraints.push_back(std::move(c));
  }
  // per-vehicle stop budget
  for (int k = 0; k < kk; ++k) {
    LinearConstraint c;
    c.label = "maxstop[" + std::to_string(k) + "]";
    c.coeffs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < nv; ++i)
      for (int j = 1; j < nv; ++j)
        if (i != j) c.coeffs(x[i][j][k]) = 1.0;
    c.rhs = inst.maxstop;
    model.ineq_constraints.push_back(std::move(c));
  }
  model.validate();
  return model;
}

QuboProblem to_qubo(const QuadraticModel& model, const PenaltyChoice& penalty) {
  model.validate();
  require(penalty.lambda > 0.0, "penalization factor must be positive");
  const int nvars = model.n_variables();

  // binary expansion of every model variable
  std::vector<AffineBits> expansion(nvars);
  std::vector<QuboVarBit> var_map;
  int bit = 0;
  for (int i = 0; i < nvars; ++i) {
    const auto& v = model.variables[i];
    expansion[i].constant = static_cast<double>(v.lower);
    if (v.lower == v.upper) continue;  // pinned variable, no bits
    for (long w : slack_coefficients(v.upper - v.lower)) {
      expansion[i].terms.emplace_back(bit, static_cast<double>(w));
      var_map.push_back({QuboVarBit::Source::model_variable, i, w});
      ++bit;
    }
  }

  // binarized slacks for the inequalities
  std::vector<AffineBits> slack(model.ineq_constraints.size());
  for (std::size_t c = 0; c < model.ineq_constraints.size(); ++c) {
    const auto& con = model.ineq_constraints[c];
    double min_g = 0.0;
    for (int i = 0; i < nvars; ++i) {
      const double a = con.coeffs(i);
      if (a > 0.0)
        min_g += a * static_cast<double>(model.variables[i].lower);
      else if (a < 0.0)
        min_g += a * static_cast<double>(model.variables[i].upper);
    }
    const double range = static_cast<double>(con.rhs) - min_g;
    if (range < 0.0)
      throw std::invalid_argument("constraint " + con.label +
                                  " can never be satisfied within variable bounds");
    const long bound = static_cast<long>(std::floor(range + 1e-9));
    if (bound == 0) continue;  // inequality is tight everywhere it holds
    for (long w : slack_coefficients(bound)) {
      slack[c].terms.emplace_back(bit, static_cast<double>(w));
      var_map.push_back({QuboVarBit::Source::slack, static_cast<int>(c), w});
      ++bit;
    }
  }

  QuboAccumulator acc(bit);

  // objective
  acc.add_constant(model.objective_constant);
  for (int i = 0; i < nvars; ++i) {
    const double li = model.linear(i);
    if (li == 0.0) continue;
    acc.add_constant(li * expansion[i].constant);
    for (const auto& [b, w] : expansion[i].terms) acc.add_linear(b, li * w);
  }
  for (int i = 0; i < nvars; ++i)
    for (int j = 0; j < nvars; ++j) {
      const double qij = model.quadratic(i, j);
      if (qij != 0.0) acc.add_product(expansion[i], expansion[j], qij);
    }

  // penalties
  auto residual = [&](const LinearConstraint& con, const AffineBits* s) {
    AffineBits r;
    r.constant = -static_cast<double>(con.rhs);
    for (int i = 0; i < nvars; ++i) {
      const double a = con.coeffs(i);
      if (a == 0.0) continue;
      r.constant += a * expansion[i].constant;
      for (const auto& [b, w] : expansion[i].terms) r.terms.emplace_back(b, a * w);
    }
    if (s)
      for (const auto& t : s->terms) r.terms.push_back(t);
    return r;
  };
  for (const auto& con : model.eq_constraints)
    acc.add_square(residual(con, nullptr), penalty.lambda);
  for (std::size_t c = 0; c < model.ineq_constraints.size(); ++c)
    acc.add_square(residual(model.ineq_constraints[c], &slack[c]), penalty.lambda);

  QuboProblem qubo;
  qubo.offset = acc.offset();
  qubo.q = acc.take_q();
  qubo.var_map = std::move(var_map);
  return qubo;
}

PenaltyChoice penalty_heuristic(const QuadraticModel& model, double factor) {
  model.validate();
  require(factor >= 0.75 && factor <= 1.50,
          "heuristic factor must lie in [0.75, 1.50]");
  const double estimate =
      model.linear.cwiseAbs().sum() + model.quadratic.cwiseAbs().sum();
  PenaltyChoice choice;
  choice.lambda = estimate == 0.0 ? 1.0 : std::ceil(factor * estimate);
  choice.provenance = PenaltyChoice::Provenance::heuristic;
  return choice;
}

Eigen::VectorXd decode_bits(const QuadraticModel& model, const QuboProblem& qubo,
                            const Eigen::VectorXd& bits) {
  require(bits.size() == qubo.size(), "bit vector size mismatch");
  Eigen::VectorXd values(model.n_variables());
  for (int i = 0; i < model.n_variables(); ++i)
    values(i) = static_cast<double>(model.variables[i].lower);
  for (std::size_t b = 0; b < qubo.var_map.size(); ++b) {
    const auto& entry = qubo.var_map[b];
    if (entry.source == QuboVarBit::Source::model_variable)
      values(entry.index) += static_cast<double>(entry.weight) * bits(b);
  }
  return values;
}

Eigen::VectorXd decode_slacks(const QuadraticModel& model, const QuboProblem& qubo,
                              const Eigen::VectorXd& bits) {
  require(bits.size() == qubo.size(), "bit vector size mismatch");
  Eigen::VectorXd slacks =
      Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.ineq_constraints.size()));
  for (std::size_t b = 0; b < qubo.var_map.size(); ++b) {
    const auto& entry = qubo.var_map[b];
    if (entry.source == QuboVarBit::Source::slack)
      slacks(entry.index) += static_cast<double>(entry.weight) * bits(b);
  }
  return slacks;
}

namespace {

// writes the expansion bits for one target value; greedy from the last
// coefficient downwards is exact for slack_coefficients layouts
void fill_expansion_bits(long value, const std::vector<std::pair<int, long>>& bit_weights,
                         Eigen::VectorXd& bits) {
  long rest = value;
  for (auto it = bit_weights.rbegin(); it != bit_weights.rend(); ++it) {
    if (it->second <= rest) {
      bits(it->first) = 1.0;
      rest -= it->second;
    }
  }
  if (rest != 0) throw std::invalid_argument("value not representable by expansion");
}

}  // namespace

Eigen::VectorXd encode_to_bits(const QuadraticModel& model, const QuboProblem& qubo,
                               const Eigen::VectorXd& assignment) {
  require(assignment.size() == model.n_variables(), "assignment size mismatch");
  Eigen::VectorXd bits = Eigen::VectorXd::Zero(qubo.size());

  std::vector<std::vector<std::pair<int, long>>> var_bits(model.n_variables());
  std::vector<std::vector<std::pair<int, long>>> slack_bits(model.ineq_constraints.size());
  for (std::size_t b = 0; b < qubo.var_map.size(); ++b) {
    const auto& entry = qubo.var_map[b];
    auto& target = entry.source == QuboVarBit::Source::model_variable
                       ? var_bits[entry.index]
                       : slack_bits[entry.index];
    target.emplace_back(static_cast<int>(b), entry.weight);
  }

  for (int i = 0; i < model.n_variables(); ++i) {
    const auto& v = model.variables[i];
    const double value = assignment(i);
    require(value == std::round(value), "assignment must be integral");
    require(value >= static_cast<double>(v.lower) && value <= static_cast<double>(v.upper),
            "assignment outside bounds of " + v.name);
    fill_expansion_bits(static_cast<long>(value) - v.lower, var_bits[i], bits);
  }
  for (std::size_t c = 0; c < model.ineq_constraints.size(); ++c) {
    long smax = 0;
    for (const auto& [bit, w] : slack_bits[c]) smax += w;
    const double g = model.ineq_constraints[c].coeffs.dot(assignment);
    const double wanted = static_cast<double>(model.ineq_constraints[c].rhs) - g;
    const long s = std::clamp(static_cast<long>(std::llround(wanted)), 0L, smax);
    fill_expansion_bits(s, slack_bits[c], bits);
  }
  return bits;
}

Eigen::VectorXd encode_slotting(const QuadraticModel& model, const AspInstance& inst,
                                const SlottingSolution& sol) {
  require(static_cast<int>(sol.assignment.size()) == inst.n_materials,
          "assignment must cover every material");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(model.n_variables());
  const int k = inst.n_aisles();
  for (int v = 0; v < model.n_variables(); ++v) {
    int m, j;
    if (std::sscanf(model.variables[v].name.c_str(), "x[%d,%d]", &m, &j) == 2) {
      require(j >= 0 && j < k && m >= 0 && m < inst.n_materials,
              "model variable outside instance ranges");
      if (sol.assignment[m] == j) x(v) = 1.0;
    }
  }
  return x;
}

Eigen::VectorXd encode_routes(const QuadraticModel& model, const OvrpInstance& inst,
                              const RouteSolution& sol) {
  evaluate_ovrp(inst, sol);  // reuse full validation
  require(static_cast<int>(sol.routes.size()) <= inst.n_vehicles,
          "more routes than vehicles");
  std::vector<int> order(inst.n_nodes, 1);
  std::vector<std::tuple<int, int, int>> arcs;  // (i, j, vehicle)
  for (std::size_t k = 0; k < sol.routes.size(); ++k) {
    const auto& route = sol.routes[k];
    int prev = 0;
    for (std::size_t p = 0; p < route.size(); ++p) {
      arcs.emplace_back(prev, route[p], static_cast<int>(k));
      order[route[p]] = static_cast<int>(p) + 1;
      prev = route[p];
    }
  }
  Eigen::VectorXd x(model.n_variables());
  for (int v = 0; v < model.n_variables(); ++v) {
    int i, j, k;
    if (std::sscanf(model.variables[v].name.c_str(), "x[%d,%d,%d]", &i, &j, &k) == 3) {
      x(v) = std::count(arcs.begin(), arcs.end(), std::make_tuple(i, j, k)) > 0 ? 1.0 : 0.0;
    } else if (std::sscanf(model.variables[v].name.c_str(), "u[%d]", &i) == 1) {
      x(v) = static_cast<double>(order[i]);
    } else {
      throw std::invalid_argument("unexpected variable " + model.variables[v].name);
    }
  }
  return x;
}

void save_qubo(const QuboProblem& qubo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write QUBO file: " + path);
  const int n = qubo.size();
  out << n << " " << fmt_double(qubo.offset) << "\n";
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = i == j ? qubo.q(i, i) : qubo.q(i, j) + qubo.q(j, i);
      if (v != 0.0) out << i << " " << j << " " << fmt_double(v) << "\n";
    }
}

QuboProblem load_qubo(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open QUBO file: " + path);
  int n = 0;
  QuboProblem qubo;
  in >> n >> qubo.offset;
  require(n >= 0 && in.good(), "malformed QUBO header");
  qubo.q = Eigen::MatrixXd::Zero(n, n);
  int i, j;
  double v;
  while (in >> i >> j >> v) {
    require(i >= 0 && j >= i && j < n, "QUBO entry out of range");
    if (i == j) {
      qubo.q(i, i) = v;
    } else {
      qubo.q(i, j) = 0.5 * v;
      qubo.q(j, i) = 0.5 * v;
    }
  }
  return qubo;
}

}  // namespace qsdp
