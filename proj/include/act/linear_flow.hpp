#pragma once

#include <Eigen/Dense>
#include <functional>

#include "act/time_grid.hpp"

namespace act {

/// exp(M) by scaling-and-squaring with a diagonal Pade(6) approximant.
Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& M);

/// State transition matrix Phi(t, t0) = exp(A (t - t0)) of a constant-matrix
/// linear system.
Eigen::MatrixXd state_transition(const Eigen::MatrixXd& A, double t, double t0);

/// Solves xdot = A x + f(t) on the grid:
///   x(t) = Phi(t,t0) x0 + integral of Phi(t,tau) f(tau) dtau,
/// with the convolution evaluated by composite trapezoid. `refine` subdivides
/// each grid step for the quadrature without changing the output nodes.
Trajectory solve_forced_linear(const Eigen::MatrixXd& A,
                               const std::function<Eigen::VectorXd(double)>& f,
                               const Eigen::VectorXd& x0, const TimeGrid& grid, int refine = 1);

}  // namespace act
