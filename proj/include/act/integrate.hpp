#pragma once

#include <Eigen/Dense>
#include <functional>

#include "act/time_grid.hpp"

namespace act {

using OdeRhs = std::function<void(double t, const Eigen::VectorXd& x, Eigen::VectorXd& dxdt)>;

/// Classical fixed-step RK4 sampling every grid node. Throws NonFinite if a
/// state component leaves the representable range. Derivatives are stored
/// from the right-hand side at the nodes.
Trajectory integrate_ivp(const OdeRhs& rhs, const Eigen::VectorXd& x0, const TimeGrid& grid);

/// Single RK4 step, reusing caller-provided stage buffers (k1..k4, xtmp must
/// have the state size). Advances x in place from t by h.
void rk4_step(const OdeRhs& rhs, double t, double h, Eigen::VectorXd& x, Eigen::VectorXd& k1,
              Eigen::VectorXd& k2, Eigen::VectorXd& k3, Eigen::VectorXd& k4,
              Eigen::VectorXd& xtmp);

}  // namespace act
