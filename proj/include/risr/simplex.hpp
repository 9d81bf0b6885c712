#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace risr {

constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize cost . x  subject to  row_lo <= A x <= row_up, lo <= x <= up.
// Rows are stored sparse (index/value pairs); the solver is dense.
struct LinearProgram {
  struct Row {
    std::vector<int> idx;
    std::vector<double> val;
    double lo = -kInf;
    double up = kInf;
    std::string name;
  };

  std::vector<double> cost, lo, up;
  std::vector<std::string> var_names;
  std::vector<Row> rows;

  int num_vars() const { return static_cast<int>(cost.size()); }
  int add_var(double l, double u, double c, std::string name);
  void add_row(std::vector<int> idx, std::vector<double> val, double l,
               double u, std::string name);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus s);

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  Eigen::VectorXd x;
  std::vector<int> infeasible_rows;  // rows still carrying artificial residual
  int iterations = 0;
};

// Two-phase bounded-variable tableau simplex. Deterministic: Dantzig pricing
// with lowest-index ties, Bland's rule after a non-improving streak.
LpSolution solve_lp(const LinearProgram& lp, int max_iterations = 50000);

}  // namespace risr
