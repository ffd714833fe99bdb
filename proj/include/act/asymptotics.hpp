#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>

#include "act/time_grid.hpp"

namespace act {

/// Tracking problem for the planar class xdot = a0 + a1 x + a2 y,
/// ydot = R(x,y) + b(x,y) u with running weights s1, s2, terminal weight
/// beta1 on x, a sharp terminal condition on y, and small control penalty
/// epsilon. The y-misfit weight s2 sets the boundary-layer rate.
struct Problem2D {
  double a0 = 0.0, a1 = 0.0, a2 = 1.0;
  std::function<double(double, double)> R;  // nonlinearity R(x, y)
  std::function<double(double, double)> b;  // coupling, nonvanishing
  double s1 = 1.0, s2 = 1.0;
  double beta1 = 0.0;
  bool beta1_infinite = false;
  double epsilon = 1e-2;
  std::function<double(double)> x_d, y_d;
  std::function<double(double)> x_d_dot, y_d_dot;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  TimeGrid grid;

  double phi1() const;  // sqrt(a1^2 s2 + a2^2 s1) / sqrt(s2)
};

/// Boundary-layer samples Y(tau) on the stretched time tau in [0, tau_max].
struct LayerSolution {
  Eigen::VectorXd tau;
  Eigen::VectorXd y;
  double target = 0.0;  // matching value approached as tau grows

  /// Linear interpolation; clamps to the matched target beyond tau_max.
  double at(double t) const;
  double tau_max() const { return tau.size() ? tau[tau.size() - 1] : 0.0; }
};

struct OuterSolution {
  Trajectory outer;  // rows: x_O, y_O, lambda_O; derivatives carry their rates
  double y_init = 0.0;
  double y_end = 0.0;
  double kappa = 0.0;
};

struct Composite2D {
  double y_init = 0.0, y_end = 0.0, kappa = 0.0;
  Trajectory outer;      // x_O, y_O, lambda_O
  LayerSolution YL, YR;
  Trajectory composite;  // rows: x, y, lambda_x, u
  double epsilon = 0.0;
};

struct Eps0Report {
  double jump_left = 0.0, jump_right = 0.0;
  double kick_left = 0.0, kick_right = 0.0;
  Trajectory interior;  // rows: x_O, y_O, lambda_O, u_O
};

/// Outer (reduced) solution: the linear slow system solved with the matching
/// constant y_init determined by the terminal data, all convolutions by
/// trapezoid on the problem grid.
OuterSolution outer_solution(const Problem2D& problem);

/// Left and right boundary layers Y' = sqrt(s2) (target - Y) |b|, started at
/// y0 and y1 respectively.
std::pair<LayerSolution, LayerSolution> inner_layers(const Problem2D& problem, double y_init,
                                                     double y_end);

/// Uniformly valid state/co-state/control: outer plus layers minus overlaps.
Composite2D composite_solution(const Problem2D& problem);

/// Limit of vanishing control penalty: jump heights of y at the interval
/// ends and the delta-kick coefficients (twice the jumps).
Eps0Report eps0_limit(const Problem2D& problem);

/// Continuous time feedback for an infinite horizon; the improper integral
/// in the matching constant is truncated once its kernel has decayed below
/// 1e-12.
double feedback_law(const Problem2D& problem, double x, double y, double t);

/// Time-delayed variant: the composite control with t0 -> t - T and initial
/// data replaced by the delayed measurement; the matching constants are
/// recomputed per call.
double delayed_feedback_law(const Problem2D& problem, double x_delayed, double y_delayed,
                            double t, double delay);

}  // namespace act
