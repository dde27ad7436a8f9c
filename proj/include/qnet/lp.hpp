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

#ifndef QNET_LP_HPP
#define QNET_LP_HPP

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace qnet::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  /// Appends a row; the first row fixes the column count.
  void append_row(std::span<const double> values);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// maximize c'z + offset  s.t.  G z <= h,  l <= z <= u.
/// Lower bounds may be -inf and upper bounds +inf.
struct LpProblem {
  std::vector<double> objective;
  double objective_offset = 0.0;
  DenseMatrix constraints;
  std::vector<double> rhs;
  std::vector<double> lower;
  std::vector<double> upper;

  LpProblem() = default;
  /// n variables with bounds [0, +inf) and no rows.
  explicit LpProblem(std::size_t num_vars);

  std::size_t num_vars() const noexcept { return objective.size(); }
  std::size_t num_rows() const noexcept { return rhs.size(); }

  void add_row(std::span<const double> coeffs, double bound);

  /// Throws std::invalid_argument on inconsistent sizes, NaNs or l > u.
  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

std::string to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> z;
  double objective_value = 0.0;  // includes the offset
  /// Row multipliers y >= 0 and reduced costs d = c - G'y at the optimum.
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  int iterations = 0;
};

struct SolverOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-11;
  int refactor_interval = 50;
  int max_iterations = 0;  // 0: 100 (m + n) + 1000
  bool scale = true;
};

/// Bounded-variable revised simplex: two phases, Dantzig pricing, Bland's
/// rule after 5 (m + n) iterations without objective progress. Dense basis
/// inverse with product-form updates and periodic refactorisation.
/// Deterministic for a given problem.
LpSolution solve(const LpProblem& problem, const SolverOptions& options = {});

struct ResidualReport {
  double max_violation = 0.0;
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
};

ResidualReport check_feasible(const LpProblem& problem, std::span<const double> z);

/// Complementary-slackness and strong-duality check of an optimal solution.
struct DualityReport {
  double max_dual_infeasibility = 0.0;  // wrong-signed y or reduced costs
  double max_complementarity = 0.0;     // |y_i * slack_i|, |d_j * gap_j|, scaled
  double duality_gap = 0.0;             // relative |primal - dual|
};

DualityReport check_duality(const LpProblem& problem, const LpSolution& solution);

/// Plain-text dump:
///   qnet-lp 1
///   vars <n> rows <m>
///   offset <v>
///   obj <c_1> ... <c_n>
///   lower <l_1> ... ; upper <u_1> ...   (inf / -inf allowed)
///   row <g_1> ... <g_n> <= <h>          (one line per row)
void write_text(std::ostream& out, const LpProblem& problem);
LpProblem read_text(std::istream& in);

}  // namespace qnet::lp

#endif  // QNET_LP_HPP
