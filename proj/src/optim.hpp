#pragma once

#include <functional>

#include <Eigen/Core>

namespace gpsmc {

struct OptimResult {
  Eigen::VectorXd x;
  double value = 0.0;         // objective at x
  int iterations = 0;
  bool converged = false;     // gradient-norm tolerance reached
  int function_evals = 0;
};

struct OptimOptions {
  int max_iterations = 500;
  double grad_tolerance = 1e-8;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  int max_line_search_steps = 60;
};

// BFGS minimization of f with analytic gradient: f(x, grad_out) -> value.
// The objective may return +inf to mark an infeasible point; the line search
// backs off. Non-finite values at the starting point throw.
OptimResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const OptimOptions& opts = {});

}  // namespace gpsmc
