#include "act/linear_flow.hpp"

#include <cmath>

#include "act/errors.hpp"

namespace act {

Eigen::MatrixXd matrix_exp(const Eigen::MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
  if (!std::isfinite(norm)) throw NonFinite("matrix_exp: non-finite input");

  int squarings = 0;
  if (norm > 0.5) squarings = std::max(0, 1 + static_cast<int>(std::floor(std::log2(norm))));
  const Eigen::MatrixXd A = M / std::ldexp(1.0, squarings);

  // Diagonal Pade(6): exp(A) ~ D^{-1} N with N/D sharing even powers.
  static const double c[] = {1.0,         1.0 / 2.0,     5.0 / 44.0,    1.0 / 66.0,
                             1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0};
  const Eigen::MatrixXd A2 = A * A;
  const Eigen::MatrixXd A4 = A2 * A2;
  const Eigen::MatrixXd A6 = A4 * A2;
  const Eigen::MatrixXd U = A * (c[1] * I + c[3] * A2 + c[5] * A4);
  const Eigen::MatrixXd V = c[0] * I + c[2] * A2 + c[4] * A4 + c[6] * A6;
  Eigen::MatrixXd E = (V - U).partialPivLu().solve(V + U);

  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

Eigen::MatrixXd state_transition(const Eigen::MatrixXd& A, double t, double t0) {
  return matrix_exp(A * (t - t0));
}

Trajectory solve_forced_linear(const Eigen::MatrixXd& A,
                               const std::function<Eigen::VectorXd(double)>& f,
                               const Eigen::VectorXd& x0, const TimeGrid& grid, int refine) {
  if (refine < 1) refine = 1;
  const int n = static_cast<int>(x0.size());
  const double h = grid.dt() / refine;
  const Eigen::MatrixXd Phi = matrix_exp(A * h);  // one substep propagator

  Trajectory out(grid, n);
  out.derivatives.resize(n, grid.size());
  Eigen::VectorXd x = x0;
  out.values.col(0) = x;
  out.derivatives.col(0) = A * x + f(grid.t0);

  Eigen::VectorXd f_lo = f(grid.t0);
  for (int k = 0; k < grid.steps; ++k) {
    for (int s = 0; s < refine; ++s) {
      const double t_hi = grid.time(k) + (s + 1) * h;
      const Eigen::VectorXd f_hi = f(t_hi);
      // Per-substep trapezoid with the exact propagator weight on the left
      // endpoint: integral of Phi(t_hi, tau) f(tau) over one substep.
      x = Phi * (x + 0.5 * h * f_lo) + 0.5 * h * f_hi;
      f_lo = f_hi;
    }
    out.values.col(k + 1) = x;
    out.derivatives.col(k + 1) = A * x + f_lo;
  }
  return out;
}

}  // namespace act
