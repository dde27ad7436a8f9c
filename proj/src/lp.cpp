// Copyright 2026 The qnet Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qnet/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qnet::lp {

void DenseMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && data_.empty()) {
    cols_ = values.size();
  } else if (values.size() != cols_) {
    throw std::invalid_argument("DenseMatrix::append_row: column count mismatch");
  }
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

LpProblem::LpProblem(std::size_t num_vars)
    : objective(num_vars, 0.0),
      constraints(0, num_vars),
      lower(num_vars, 0.0),
      upper(num_vars, kInf) {}

void LpProblem::add_row(std::span<const double> coeffs, double bound) {
  if (coeffs.size() != num_vars()) {
    throw std::invalid_argument("LpProblem::add_row: expected " + std::to_string(num_vars()) +
                                " coefficients, got " + std::to_string(coeffs.size()));
  }
  constraints.append_row(coeffs);
  rhs.push_back(bound);
}

void LpProblem::validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("LpProblem: bound vectors must have one entry per variable");
  }
  if (constraints.rows() != rhs.size() || (rhs.size() > 0 && constraints.cols() != n)) {
    throw std::invalid_argument("LpProblem: constraint matrix shape does not match rhs/objective");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(objective[j]) || std::isnan(lower[j]) || std::isnan(upper[j])) {
      throw std::invalid_argument("LpProblem: NaN in objective or bounds");
    }
    if (lower[j] > upper[j]) {
      throw std::invalid_argument("LpProblem: lower > upper for variable " + std::to_string(j));
    }
    if (lower[j] == kInf || upper[j] == -kInf) {
      throw std::invalid_argument("LpProblem: empty bound interval for variable " +
                                  std::to_string(j));
    }
  }
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    if (!std::isfinite(rhs[i])) throw std::invalid_argument("LpProblem: rhs must be finite");
    for (double v : constraints.row(i)) {
      if (!std::isfinite(v)) throw std::invalid_argument("LpProblem: constraint entries must be finite");
    }
  }
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

namespace {

enum class VarState { kBasic, kAtLower, kAtUpper, kFree };

enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

class Simplex {
 public:
  Simplex(const LpProblem& problem, const SolverOptions& options)
      : problem_(problem), options_(options) {
    n_ = problem.num_vars();
    m_ = problem.num_rows();
    scale();
    build();
    max_iterations_ = options.max_iterations > 0
                          ? options.max_iterations
                          : static_cast<int>(100 * (m_ + n_) + 1000);
  }

  LpSolution run() {
    LpSolution sol;
    if (num_artificial_ > 0) {
      std::fill(cost_.begin(), cost_.end(), 0.0);
      for (std::size_t j = n_ + m_; j < cols_; ++j) cost_[j] = -1.0;
      const PhaseResult r = iterate();
      if (r == PhaseResult::kIterationLimit) return finish(sol, LpStatus::kIterationLimit);
      double infeasibility = 0.0;
      double scale_sum = 0.0;
      for (std::size_t j = n_ + m_; j < cols_; ++j) {
        infeasibility += x_[j];
        scale_sum += 1.0 + std::abs(b_[artificial_row_[j - n_ - m_]]);
      }
      if (infeasibility > options_.feasibility_tol * scale_sum) {
        return finish(sol, LpStatus::kInfeasible);
      }
      for (std::size_t j = n_ + m_; j < cols_; ++j) {
        hi_[j] = 0.0;
        if (state_[j] != VarState::kBasic) {
          state_[j] = VarState::kAtLower;
          x_[j] = 0.0;
        }
      }
    }
    cost_ = phase2_cost_;
    const PhaseResult r = iterate();
    if (r == PhaseResult::kUnbounded) return finish(sol, LpStatus::kUnbounded);
    if (r == PhaseResult::kIterationLimit) return finish(sol, LpStatus::kIterationLimit);
    return finish(sol, LpStatus::kOptimal);
  }

 private:
  void scale() {
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    if (!options_.scale) return;
    for (std::size_t i = 0; i < m_; ++i) {
      double mx = 0.0;
      for (double v : problem_.constraints.row(i)) mx = std::max(mx, std::abs(v));
      if (mx > 0.0) row_scale_[i] = 1.0 / mx;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      double mx = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        mx = std::max(mx, std::abs(problem_.constraints(i, j) * row_scale_[i]));
      }
      if (mx > 0.0) col_scale_[j] = 1.0 / mx;
    }
  }

  double tol_for(double bound) const { return options_.feasibility_tol * (1.0 + std::abs(bound)); }

  void build() {
    // Initial nonbasic point for structurals.
    std::vector<double> lo(n_), hi(n_), x0(n_);
    std::vector<VarState> st(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      lo[j] = problem_.lower[j] / col_scale_[j];
      hi[j] = problem_.upper[j] / col_scale_[j];
      if (std::isfinite(lo[j])) {
        st[j] = VarState::kAtLower;
        x0[j] = lo[j];
      } else if (std::isfinite(hi[j])) {
        st[j] = VarState::kAtUpper;
        x0[j] = hi[j];
      } else {
        st[j] = VarState::kFree;
        x0[j] = 0.0;
      }
    }
    std::vector<double> residual(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      double acc = problem_.rhs[i] * row_scale_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        acc -= problem_.constraints(i, j) * row_scale_[i] * col_scale_[j] * x0[j];
      }
      residual[i] = acc;
      if (acc < -tol_for(problem_.rhs[i] * row_scale_[i])) artificial_row_.push_back(i);
    }
    num_artificial_ = artificial_row_.size();
    cols_ = n_ + m_ + num_artificial_;

    a_ = DenseMatrix(m_, cols_);
    b_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      b_[i] = problem_.rhs[i] * row_scale_[i];
      for (std::size_t j = 0; j < n_; ++j) {
        a_(i, j) = problem_.constraints(i, j) * row_scale_[i] * col_scale_[j];
      }
      a_(i, n_ + i) = 1.0;
    }
    for (std::size_t k = 0; k < num_artificial_; ++k) a_(artificial_row_[k], n_ + m_ + k) = -1.0;

    lo_.assign(cols_, 0.0);
    hi_.assign(cols_, kInf);
    x_.assign(cols_, 0.0);
    state_.assign(cols_, VarState::kAtLower);
    phase2_cost_.assign(cols_, 0.0);
    cost_.assign(cols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      lo_[j] = lo[j];
      hi_[j] = hi[j];
      x_[j] = x0[j];
      state_[j] = st[j];
      phase2_cost_[j] = problem_.objective[j] * col_scale_[j];
    }

    basis_.assign(m_, 0);
    std::vector<bool> has_artificial(m_, false);
    for (std::size_t k = 0; k < num_artificial_; ++k) {
      const std::size_t i = artificial_row_[k];
      has_artificial[i] = true;
      basis_[i] = n_ + m_ + k;
      state_[n_ + m_ + k] = VarState::kBasic;
      x_[n_ + m_ + k] = -residual[i];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (!has_artificial[i]) {
        basis_[i] = n_ + i;
        state_[n_ + i] = VarState::kBasic;
        x_[n_ + i] = residual[i];
      }
    }
    // Initial basis matrix is diagonal +-1.
    binv_ = DenseMatrix(m_, m_);
    for (std::size_t i = 0; i < m_; ++i) binv_(i, i) = has_artificial[i] ? -1.0 : 1.0;
  }

  void refactor() {
    if (m_ == 0) return;
    // Gauss-Jordan on [B | I] with partial pivoting.
    DenseMatrix work(m_, 2 * m_);
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < m_; ++k) work(i, k) = a_(i, basis_[k]);
      work(i, m_ + i) = 1.0;
    }
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r) {
        if (std::abs(work(r, c)) > std::abs(work(piv, c))) piv = r;
      }
      if (std::abs(work(piv, c)) < 1e-14) throw std::runtime_error("lp::solve: singular basis");
      if (piv != c) {
        for (std::size_t k = 0; k < 2 * m_; ++k) std::swap(work(piv, k), work(c, k));
      }
      const double inv = 1.0 / work(c, c);
      for (std::size_t k = 0; k < 2 * m_; ++k) work(c, k) *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = work(r, c);
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < 2 * m_; ++k) work(r, k) -= f * work(c, k);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < m_; ++k) binv_(i, k) = work(i, m_ + k);
    }
    recompute_basic_values();
  }

  void recompute_basic_values() {
    std::vector<double> rhs = b_;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) rhs[i] -= a_(i, j) * x_[j];
    }
    for (std::size_t k = 0; k < m_; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m_; ++i) acc += binv_(k, i) * rhs[i];
      x_[basis_[k]] = acc;
    }
  }

  std::vector<double> duals() const {
    std::vector<double> y(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) {
      const double cb = cost_[basis_[k]];
      if (cb == 0.0) continue;
      for (std::size_t i = 0; i < m_; ++i) y[i] += cb * binv_(k, i);
    }
    return y;
  }

  double reduced_cost(std::size_t j, const std::vector<double>& y) const {
    double d = cost_[j];
    for (std::size_t i = 0; i < m_; ++i) d -= y[i] * a_(i, j);
    return d;
  }

  double objective() const {
    double v = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) v += cost_[j] * x_[j];
    return v;
  }

  PhaseResult iterate() {
    double cmax = 1.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    const double opt_tol = options_.optimality_tol * cmax;
    const std::size_t stall_limit = 5 * (m_ + n_);
    std::size_t stall = 0;
    bool bland = false;
    double best = objective();
    int since_refactor = 0;

    std::vector<double> alpha(m_);
    for (;;) {
      if (iterations_ >= max_iterations_) return PhaseResult::kIterationLimit;
      if (since_refactor >= options_.refactor_interval) {
        refactor();
        since_refactor = 0;
      }
      const std::vector<double> y = duals();

      // Pricing.
      std::size_t entering = cols_;
      int direction = 0;
      double best_score = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        if (lo_[j] == hi_[j]) continue;
        const double d = reduced_cost(j, y);
        int dir = 0;
        if (state_[j] == VarState::kAtLower && d > opt_tol) dir = 1;
        else if (state_[j] == VarState::kAtUpper && d < -opt_tol) dir = -1;
        else if (state_[j] == VarState::kFree && std::abs(d) > opt_tol) dir = d > 0 ? 1 : -1;
        if (dir == 0) continue;
        if (bland) {
          entering = j;
          direction = dir;
          break;
        }
        if (std::abs(d) > best_score) {
          best_score = std::abs(d);
          entering = j;
          direction = dir;
        }
      }
      if (entering == cols_) return PhaseResult::kOptimal;

      for (std::size_t k = 0; k < m_; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m_; ++i) acc += binv_(k, i) * a_(i, entering);
        alpha[k] = acc;
      }

      // Ratio test. x_B[k] changes by delta_k per unit step.
      double step = kInf;
      std::size_t leave = m_;
      double leave_pivot = 0.0;
      for (std::size_t k = 0; k < m_; ++k) {
        const double delta = -direction * alpha[k];
        if (std::abs(alpha[k]) <= options_.pivot_tol) continue;
        const std::size_t var = basis_[k];
        double ratio;
        if (delta < 0.0) {
          if (!std::isfinite(lo_[var])) continue;
          ratio = (x_[var] - lo_[var]) / -delta;
        } else {
          if (!std::isfinite(hi_[var])) continue;
          ratio = (hi_[var] - x_[var]) / delta;
        }
        ratio = std::max(ratio, 0.0);
        const double tie = 1e-12 * (1.0 + step);
        bool take = false;
        if (leave == m_ || ratio < step - tie) {
          take = true;
        } else if (ratio <= step + tie) {
          take = bland ? basis_[k] < basis_[leave] : std::abs(alpha[k]) > std::abs(leave_pivot);
        }
        if (take) {
          step = ratio;
          leave = k;
          leave_pivot = alpha[k];
        }
      }
      const double flip = hi_[entering] - lo_[entering];
      const bool bound_flip = flip <= step;
      if (bound_flip) step = flip;
      if (!std::isfinite(step)) return PhaseResult::kUnbounded;

      ++iterations_;
      ++since_refactor;
      for (std::size_t k = 0; k < m_; ++k) x_[basis_[k]] += -direction * alpha[k] * step;
      if (bound_flip) {
        if (direction > 0) {
          x_[entering] = hi_[entering];
          state_[entering] = VarState::kAtUpper;
        } else {
          x_[entering] = lo_[entering];
          state_[entering] = VarState::kAtLower;
        }
      } else {
        x_[entering] += direction * step;
        const std::size_t out = basis_[leave];
        const double delta = -direction * alpha[leave];
        if (delta < 0.0) {
          x_[out] = lo_[out];
          state_[out] = VarState::kAtLower;
        } else {
          x_[out] = hi_[out];
          state_[out] = VarState::kAtUpper;
        }
        basis_[leave] = entering;
        state_[entering] = VarState::kBasic;
        // Product-form update of the inverse.
        const double piv = alpha[leave];
        for (std::size_t i = 0; i < m_; ++i) binv_(leave, i) /= piv;
        for (std::size_t k = 0; k < m_; ++k) {
          if (k == leave || alpha[k] == 0.0) continue;
          const double f = alpha[k];
          for (std::size_t i = 0; i < m_; ++i) binv_(k, i) -= f * binv_(leave, i);
        }
      }

      const double obj = objective();
      if (obj > best + 1e-12 * (1.0 + std::abs(best))) {
        best = obj;
        stall = 0;
        bland = false;
      } else if (++stall > stall_limit) {
        bland = true;
      }
    }
  }

  LpSolution& finish(LpSolution& sol, LpStatus status) {
    sol.status = status;
    sol.iterations = iterations_;
    if (status != LpStatus::kOptimal) return sol;
    refactor();
    sol.z.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double z = x_[j] * col_scale_[j];
      // Snap round-off just outside a bound.
      if (z < problem_.lower[j]) z = problem_.lower[j];
      if (z > problem_.upper[j]) z = problem_.upper[j];
      sol.z[j] = z;
    }
    const std::vector<double> y = duals();
    sol.row_duals.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) sol.row_duals[i] = y[i] * row_scale_[i];
    sol.reduced_costs.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) sol.reduced_costs[j] = reduced_cost(j, y) / col_scale_[j];
    double v = problem_.objective_offset;
    for (std::size_t j = 0; j < n_; ++j) v += problem_.objective[j] * sol.z[j];
    sol.objective_value = v;
    return sol;
  }

  const LpProblem& problem_;
  const SolverOptions& options_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t cols_ = 0;
  std::size_t num_artificial_ = 0;
  std::vector<std::size_t> artificial_row_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;
  DenseMatrix a_;
  std::vector<double> b_;
  std::vector<double> lo_;
  std::vector<double> hi_;
  std::vector<double> x_;
  std::vector<double> cost_;
  std::vector<double> phase2_cost_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;
  DenseMatrix binv_;
  int iterations_ = 0;
  int max_iterations_ = 0;
};

}  // namespace

LpSolution solve(const LpProblem& problem, const SolverOptions& options) {
  problem.validate();
  Simplex simplex(problem, options);
  return simplex.run();
}

ResidualReport check_feasible(const LpProblem& problem, std::span<const double> z) {
  if (z.size() != problem.num_vars()) {
    throw std::invalid_argument("check_feasible: point has wrong dimension");
  }
  ResidualReport report;
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    double lhs = 0.0;
    const auto row = problem.constraints.row(i);
    for (std::size_t j = 0; j < z.size(); ++j) lhs += row[j] * z[j];
    report.max_row_violation = std::max(report.max_row_violation, lhs - problem.rhs[i]);
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    report.max_bound_violation = std::max(report.max_bound_violation, problem.lower[j] - z[j]);
    report.max_bound_violation = std::max(report.max_bound_violation, z[j] - problem.upper[j]);
  }
  report.max_violation = std::max(report.max_row_violation, report.max_bound_violation);
  return report;
}

DualityReport check_duality(const LpProblem& problem, const LpSolution& solution) {
  DualityReport report;
  if (solution.status != LpStatus::kOptimal) return report;
  const auto& z = solution.z;
  double primal = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) primal += problem.objective[j] * z[j];
  const double scale = 1.0 + std::abs(primal);
  double dual = 0.0;
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    const double y = solution.row_duals[i];
    double lhs = 0.0;
    const auto row = problem.constraints.row(i);
    for (std::size_t j = 0; j < z.size(); ++j) lhs += row[j] * z[j];
    const double slack = problem.rhs[i] - lhs;
    report.max_dual_infeasibility = std::max(report.max_dual_infeasibility, -y / scale);
    report.max_complementarity = std::max(report.max_complementarity, std::abs(y * slack) / scale);
    dual += y * problem.rhs[i];
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double d = solution.reduced_costs[j];
    if (d > 0.0) {
      if (!std::isfinite(problem.upper[j])) {
        report.max_dual_infeasibility = std::max(report.max_dual_infeasibility, d / scale);
        continue;
      }
      report.max_complementarity =
          std::max(report.max_complementarity, d * (problem.upper[j] - z[j]) / scale);
      dual += d * problem.upper[j];
    } else if (d < 0.0) {
      if (!std::isfinite(problem.lower[j])) {
        report.max_dual_infeasibility = std::max(report.max_dual_infeasibility, -d / scale);
        continue;
      }
      report.max_complementarity =
          std::max(report.max_complementarity, -d * (z[j] - problem.lower[j]) / scale);
      dual += d * problem.lower[j];
    }
  }
  report.duality_gap = std::abs(primal - dual) / scale;
  return report;
}

namespace {

void write_values(std::ostream& out, const char* tag, std::span<const double> values) {
  out << tag;
  char buf[32];
  for (double v : values) {
    if (v == kInf) {
      out << " inf";
    } else if (v == -kInf) {
      out << " -inf";
    } else {
      std::snprintf(buf, sizeof buf, " %.17g", v);
      out << buf;
    }
  }
}

std::vector<double> read_values(std::istringstream& line, std::size_t count, const char* what) {
  std::vector<double> values(count);
  for (auto& v : values) {
    std::string tok;
    if (!(line >> tok)) throw std::invalid_argument(std::string("lp text: short ") + what + " line");
    v = std::strtod(tok.c_str(), nullptr);
  }
  return values;
}

std::istringstream expect_line(std::istream& in, const std::string& tag) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head != tag) throw std::invalid_argument("lp text: expected '" + tag + "', got '" + head + "'");
    return ss;
  }
  throw std::invalid_argument("lp text: missing '" + tag + "' line");
}

}  // namespace

void write_text(std::ostream& out, const LpProblem& problem) {
  out << "qnet-lp 1\n";
  out << "vars " << problem.num_vars() << " rows " << problem.num_rows() << '\n';
  write_values(out, "offset", std::span<const double>(&problem.objective_offset, 1));
  out << '\n';
  write_values(out, "obj", problem.objective);
  out << '\n';
  write_values(out, "lower", problem.lower);
  out << '\n';
  write_values(out, "upper", problem.upper);
  out << '\n';
  for (std::size_t i = 0; i < problem.num_rows(); ++i) {
    write_values(out, "row", problem.constraints.row(i));
    write_values(out, " <=", std::span<const double>(&problem.rhs[i], 1));
    out << '\n';
  }
}

LpProblem read_text(std::istream& in) {
  auto header = expect_line(in, "qnet-lp");
  int version = 0;
  header >> version;
  if (version != 1) throw std::invalid_argument("lp text: unsupported version");
  auto dims = expect_line(in, "vars");
  std::size_t n = 0;
  std::size_t m = 0;
  std::string rows_tag;
  if (!(dims >> n >> rows_tag >> m) || rows_tag != "rows") {
    throw std::invalid_argument("lp text: malformed dimensions line");
  }
  LpProblem p(n);
  auto off = expect_line(in, "offset");
  p.objective_offset = read_values(off, 1, "offset")[0];
  auto obj = expect_line(in, "obj");
  p.objective = read_values(obj, n, "obj");
  auto lo = expect_line(in, "lower");
  p.lower = read_values(lo, n, "lower");
  auto hi = expect_line(in, "upper");
  p.upper = read_values(hi, n, "upper");
  for (std::size_t i = 0; i < m; ++i) {
    auto row = expect_line(in, "row");
    const std::vector<double> coeffs = read_values(row, n, "row");
    std::string le;
    row >> le;
    if (le != "<=") throw std::invalid_argument("lp text: expected '<=' in row");
    p.add_row(coeffs, read_values(row, 1, "row rhs")[0]);
  }
  p.validate();
  return p;
}

}  // namespace qnet::lp
