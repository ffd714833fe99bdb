#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <stdexcept>

namespace act {

/// Uniform time samples t0 + k*dt, k = 0..steps.
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int steps = 1;

  TimeGrid() = default;
  TimeGrid(double t0_, double t1_, int steps_) : t0(t0_), t1(t1_), steps(steps_) {
    if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: t1 must exceed t0");
    if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be positive");
  }

  double dt() const { return (t1 - t0) / steps; }
  int size() const { return steps + 1; }
  double time(int k) const { return t0 + k * dt(); }

  Eigen::VectorXd times() const {
    Eigen::VectorXd t(size());
    for (int k = 0; k < size(); ++k) t[k] = time(k);
    return t;
  }
};

/// Per-sample vectors on a TimeGrid, one column per node. Derivatives are
/// optional; solvers that know them analytically (or from an ODE right-hand
/// side) fill them in, otherwise derivative() falls back to 4th-order
/// finite differences.
struct Trajectory {
  TimeGrid grid;
  Eigen::MatrixXd values;       // dim x (steps+1)
  Eigen::MatrixXd derivatives;  // same shape, may be empty

  Trajectory() = default;
  Trajectory(const TimeGrid& g, int dim) : grid(g), values(Eigen::MatrixXd::Zero(dim, g.size())) {}

  int dim() const { return static_cast<int>(values.rows()); }

  bool has_derivatives() const { return derivatives.size() == values.size() && values.size() > 0; }

  /// Linear interpolation between nodes; clamps outside [t0, t1].
  Eigen::VectorXd at(double t) const {
    const double dt = grid.dt();
    double s = (t - grid.t0) / dt;
    if (s <= 0.0) return values.col(0);
    if (s >= grid.steps) return values.col(grid.steps);
    const int k = static_cast<int>(s);
    const double w = s - k;
    return (1.0 - w) * values.col(k) + w * values.col(k + 1);
  }

  /// Sampled time derivative: stored values when present, else 4th-order
  /// centered differences with one-sided stencils at the ends.
  Eigen::MatrixXd derivative() const;
};

/// 4th-order finite-difference derivative of uniformly sampled rows.
Eigen::MatrixXd fd_derivative(const Eigen::MatrixXd& values, double dt);

inline Eigen::MatrixXd Trajectory::derivative() const {
  if (has_derivatives()) return derivatives;
  return fd_derivative(values, grid.dt());
}

/// Trapezoidal quadrature of samples on a uniform grid.
inline double trapezoid(const Eigen::VectorXd& samples, double dt) {
  const int m = static_cast<int>(samples.size());
  if (m < 2) return 0.0;
  return dt * (samples.sum() - 0.5 * (samples[0] + samples[m - 1]));
}

/// Running trapezoidal integral; out[k] = integral from node 0 to node k.
inline Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& samples, double dt) {
  Eigen::VectorXd out(samples.size());
  out[0] = 0.0;
  for (int k = 1; k < samples.size(); ++k)
    out[k] = out[k - 1] + 0.5 * dt * (samples[k - 1] + samples[k]);
  return out;
}

}  // namespace act
