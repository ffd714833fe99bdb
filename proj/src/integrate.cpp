#include "act/integrate.hpp"

#include <cmath>

#include "act/errors.hpp"

namespace act {

void rk4_step(const OdeRhs& rhs, double t, double h, Eigen::VectorXd& x, Eigen::VectorXd& k1,
              Eigen::VectorXd& k2, Eigen::VectorXd& k3, Eigen::VectorXd& k4,
              Eigen::VectorXd& xtmp) {
  rhs(t, x, k1);
  xtmp = x + 0.5 * h * k1;
  rhs(t + 0.5 * h, xtmp, k2);
  xtmp = x + 0.5 * h * k2;
  rhs(t + 0.5 * h, xtmp, k3);
  xtmp = x + h * k3;
  rhs(t + h, xtmp, k4);
  x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate_ivp(const OdeRhs& rhs, const Eigen::VectorXd& x0, const TimeGrid& grid) {
  const int n = static_cast<int>(x0.size());
  Trajectory out(grid, n);
  out.derivatives.resize(n, grid.size());

  Eigen::VectorXd x = x0, k1(n), k2(n), k3(n), k4(n), xtmp(n);
  const double h = grid.dt();
  out.values.col(0) = x;
  rhs(grid.t0, x, k1);
  out.derivatives.col(0) = k1;

  for (int k = 0; k < grid.steps; ++k) {
    rk4_step(rhs, grid.time(k), h, x, k1, k2, k3, k4, xtmp);
    if (!x.allFinite())
      throw NonFinite("integrate_ivp: state became non-finite at t=" +
                      std::to_string(grid.time(k + 1)));
    out.values.col(k + 1) = x;
    rhs(grid.time(k + 1), x, k1);
    out.derivatives.col(k + 1) = k1;
  }
  return out;
}

Eigen::MatrixXd fd_derivative(const Eigen::MatrixXd& values, double dt) {
  const int m = static_cast<int>(values.cols());
  Eigen::MatrixXd d(values.rows(), m);
  if (m < 5) {
    // Too few samples for the 4th-order stencil; fall back to 2nd order.
    for (int k = 0; k < m; ++k) {
      if (k == 0)
        d.col(k) = (values.col(1) - values.col(0)) / dt;
      else if (k == m - 1)
        d.col(k) = (values.col(m - 1) - values.col(m - 2)) / dt;
      else
        d.col(k) = (values.col(k + 1) - values.col(k - 1)) / (2.0 * dt);
    }
    return d;
  }
  for (int k = 2; k < m - 2; ++k)
    d.col(k) = (-values.col(k + 2) + 8.0 * values.col(k + 1) - 8.0 * values.col(k - 1) +
                values.col(k - 2)) /
               (12.0 * dt);
  // One-sided 4th-order stencils at the ends.
  auto onesided = [&](int k, int dir) {
    return dir *
           (-25.0 * values.col(k) + 48.0 * values.col(k + dir) - 36.0 * values.col(k + 2 * dir) +
            16.0 * values.col(k + 3 * dir) - 3.0 * values.col(k + 4 * dir)) /
           (12.0 * dt);
  };
  d.col(0) = onesided(0, 1);
  d.col(1) = onesided(1, 1);
  d.col(m - 1) = onesided(m - 1, -1);
  d.col(m - 2) = onesided(m - 2, -1);
  return d;
}

}  // namespace act
