#include "optim.hpp"

#include <cmath>
#include <limits>

#include "common.hpp"

namespace gpsmc {

OptimResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& x0, const OptimOptions& opts) {
  const int dim = static_cast<int>(x0.size());
  OptimResult res;
  res.x = x0;
  Eigen::VectorXd grad(dim);
  res.value = objective(res.x, grad);
  ++res.function_evals;
  if (!std::isfinite(res.value))
    throw NumericError("bfgs: objective not finite at the starting point");

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(dim, dim);  // inverse-Hessian estimate
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (grad.norm() <= opts.grad_tolerance) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd direction = -(H * grad);
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {  // not a descent direction: reset to steepest descent
      H.setIdentity();
      direction = -grad;
      slope = grad.dot(direction);
    }

    double step = 1.0;
    Eigen::VectorXd x_new(dim), grad_new(dim);
    double value_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search_steps; ++ls) {
      x_new = res.x + step * direction;
      value_new = objective(x_new, grad_new);
      ++res.function_evals;
      if (std::isfinite(value_new) && value_new <= res.value + opts.armijo_c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.backtrack_factor;
    }
    if (!accepted) return res;  // line search stalled; best point so far

    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      // Standard BFGS inverse update (Sherman-Morrison form).
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    res.x = std::move(x_new);
    res.value = value_new;
    grad = std::move(grad_new);
  }
  if (grad.norm() <= opts.grad_tolerance) res.converged = true;
  return res;
}

}  // namespace gpsmc
