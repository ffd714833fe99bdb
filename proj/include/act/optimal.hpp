#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "act/affine_system.hpp"
#include "act/time_grid.hpp"

namespace act {

/// Quadratic tracking problem: running weight S on the state misfit,
/// terminal weight S1, control penalty eps^2 about the offset u0. Sharp
/// terminal components are handled by a large penalty added onto S1.
struct TrackingProblem {
  AffineSystem system;
  Trajectory x_d;
  Eigen::MatrixXd S;
  Eigen::MatrixXd S1;
  double epsilon = 1e-2;
  Eigen::VectorXd u0;  // control offset, zero when empty
  Eigen::VectorXd x0;
  Eigen::VectorXd x1;
  TimeGrid grid;
  std::vector<bool> sharp_terminal_mask;  // empty = none

  static constexpr double kSharpPenalty = 1e8;

  /// Terminal weight with the sharp-mask penalty folded in.
  Eigen::MatrixXd effective_S1() const {
    Eigen::MatrixXd W = S1;
    if (W.size() == 0) W = Eigen::MatrixXd::Zero(system.n, system.n);
    for (size_t i = 0; i < sharp_terminal_mask.size(); ++i)
      if (sharp_terminal_mask[i]) W(i, i) += kSharpPenalty;
    return W;
  }
  Eigen::VectorXd control_offset() const {
    return u0.size() ? u0 : Eigen::VectorXd::Zero(system.p);
  }
};

struct OptimalSolution {
  Trajectory x;
  Trajectory lambda;
  Trajectory u;
  double J = 0.0;
  int iterations = 0;
  double stationarity_residual = 0.0;  // sup-norm of eps^2 (u-u0) + B^T lambda
  bool converged = false;
  std::vector<double> J_history;  // accepted values, one per iteration
};

double evaluate_functional(const TrackingProblem& problem, const Trajectory& x,
                           const Trajectory& u);

/// Backward sweep of the co-state equation
///   -lambdadot = (gradR^T + u^T gradB^T) lambda + S (x - x_d),
/// integrated via the time-reversed substitution from
/// lambda(t1) = S1 (x(t1) - x1).
Trajectory adjoint_sweep(const TrackingProblem& problem, const Trajectory& x, const Trajectory& u);

struct GradientOptions {
  int max_iter = 5000;
  double step0 = 0.0;  // 0: default 1/eps^2 capped at 1e6
  double tol = 1e-8;   // relative J change over 10 iterations
};

/// First-order gradient iteration with backtracking line search: forward
/// state solve, backward adjoint sweep, control update
/// u <- u - s (eps^2 (u-u0) + B^T lambda).
OptimalSolution gradient_descent(const TrackingProblem& problem, const Trajectory& u_init,
                                 const GradientOptions& opts = {});

/// Exact solution of the 4x4 linear tracking problem (double integrator,
/// S = identity, x_d = 0): superposes the four cosh/sinh modes with rates
/// kappa1/kappa2 and fits the boundary conditions by one linear solve.
/// beta1_infinite replaces the x-terminal penalty by the sharp condition
/// evaluated at beta1 = 1e12.
OptimalSolution exact_linear_tracking(double epsilon, double beta1, bool beta1_infinite,
                                      double beta2, double x0, double y0, double x1, double y1,
                                      const TimeGrid& grid);

struct SingularControl {
  double u = 0.0;
  double convexity = 0.0;  // > 0: generalized convexity condition holds
  Eigen::VectorXd q;
};

/// Scalar singular control from the second total derivative of the switching
/// function, with q(x) = gradB.R - gradR.B. `convexity` is the coefficient
/// -d/du [d^2/dt^2 dH/du]; the control solution requires it nonzero.
SingularControl singular_control_scalar(const AffineSystem& sys, const Eigen::MatrixXd& S,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                        const Eigen::VectorXd& x_d, const Eigen::VectorXd& xdot_d);

}  // namespace act
