#include "act/optimal.hpp"

#include <cmath>

#include "act/errors.hpp"
#include "act/integrate.hpp"

namespace act {

namespace {

// Forward solve of the controlled state equation with u linearly
// interpolated between grid nodes, writing into `x`.
void forward_state(const TrackingProblem& pb, const Trajectory& u, Trajectory& x) {
  const AffineSystem& sys = pb.system;
  Eigen::MatrixXd Bx(sys.n, sys.p);
  Eigen::VectorXd Rx(sys.n);
  auto rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
    sys.R_into(v, Rx);
    sys.B_into(v, Bx);
    dv = Rx;
    dv.noalias() += Bx * u.at(t);
  };
  x = integrate_ivp(rhs, pb.x0, pb.grid);
}

}  // namespace

double evaluate_functional(const TrackingProblem& pb, const Trajectory& x, const Trajectory& u) {
  const int m = pb.grid.size();
  const Eigen::VectorXd u0 = pb.control_offset();
  Eigen::VectorXd integrand(m);
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd dx = x.values.col(k) - pb.x_d.values.col(k);
    const Eigen::VectorXd du = u.values.col(k) - u0;
    integrand[k] = 0.5 * dx.dot(pb.S * dx) + 0.5 * pb.epsilon * pb.epsilon * du.squaredNorm();
  }
  double J = trapezoid(integrand, pb.grid.dt());
  const Eigen::VectorXd dx1 = x.values.col(m - 1) - pb.x1;
  J += 0.5 * dx1.dot(pb.effective_S1() * dx1);
  return J;
}

Trajectory adjoint_sweep(const TrackingProblem& pb, const Trajectory& x, const Trajectory& u) {
  const AffineSystem& sys = pb.system;
  const int m = pb.grid.size();
  const Eigen::MatrixXd S1 = pb.effective_S1();

  Trajectory lambda(pb.grid, sys.n);
  Eigen::VectorXd lam = S1 * (x.values.col(m - 1) - pb.x1);
  lambda.values.col(m - 1) = lam;

  // Time-reversed integration: with ttilde = t1 - t the sweep becomes a
  // plain forward RK4 whose right-hand side samples x and u at t1 - ttilde.
  Eigen::MatrixXd JR(sys.n, sys.n);
  std::vector<Eigen::MatrixXd> G;
  auto rhs = [&](double ttilde, const Eigen::VectorXd& lv, Eigen::VectorXd& dlv) {
    const double t = pb.grid.t1 - ttilde;
    const Eigen::VectorXd xv = x.at(t);
    const Eigen::VectorXd uv = u.at(t);
    sys.gradR_into(xv, JR);
    sys.gradB_into(xv, G);
    dlv.noalias() = JR.transpose() * lv;
    for (int j = 0; j < sys.p; ++j) dlv.noalias() += uv[j] * (G[j].transpose() * lv);
    dlv.noalias() += pb.S * (xv - pb.x_d.at(t));
  };

  const double h = pb.grid.dt();
  Eigen::VectorXd k1(sys.n), k2(sys.n), k3(sys.n), k4(sys.n), tmp(sys.n);
  for (int k = m - 1; k > 0; --k) {
    const double ttilde = pb.grid.t1 - pb.grid.time(k);
    rk4_step(rhs, ttilde, h, lam, k1, k2, k3, k4, tmp);
    if (!lam.allFinite()) throw NonFinite("adjoint_sweep: co-state became non-finite");
    lambda.values.col(k - 1) = lam;
  }
  return lambda;
}

OptimalSolution gradient_descent(const TrackingProblem& pb, const Trajectory& u_init,
                                 const GradientOptions& opts) {
  const AffineSystem& sys = pb.system;
  const double eps2 = pb.epsilon * pb.epsilon;
  if (pb.epsilon <= 0.0)
    throw BadParameter("gradient_descent: epsilon must be positive (singular problems are "
                       "served by the asymptotic solvers)");
  const Eigen::VectorXd u0 = pb.control_offset();

  OptimalSolution sol;
  sol.u = u_init;
  forward_state(pb, sol.u, sol.x);
  sol.J = evaluate_functional(pb, sol.x, sol.u);

  double step = opts.step0 > 0.0 ? opts.step0 : std::min(1.0 / eps2, 1e6);
  constexpr double kStepFloor = 1e-12;
  const int window = 10;
  std::vector<double>& history = sol.J_history;
  history.assign(1, sol.J);

  Trajectory grad(pb.grid, sys.p);
  Eigen::MatrixXd Bx(sys.n, sys.p);
  Trajectory u_try = sol.u, x_try = sol.x;

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    sol.lambda = adjoint_sweep(pb, sol.x, sol.u);
    for (int k = 0; k < pb.grid.size(); ++k) {
      sys.B_into(sol.x.values.col(k), Bx);
      grad.values.col(k) =
          eps2 * (sol.u.values.col(k) - u0) + Bx.transpose() * sol.lambda.values.col(k);
    }
    sol.stationarity_residual = grad.values.cwiseAbs().maxCoeff();

    // Backtracking: halve the step until J decreases, grow it again on
    // success so the iteration hovers near the largest stable step.
    bool accepted = false;
    while (step >= kStepFloor) {
      u_try.values = sol.u.values - step * grad.values;
      try {
        forward_state(pb, u_try, x_try);
      } catch (const NonFinite&) {
        step *= 0.5;
        continue;
      }
      const double J_try = evaluate_functional(pb, x_try, u_try);
      if (std::isfinite(J_try) && J_try <= sol.J) {
        sol.u.values.swap(u_try.values);
        sol.x.values.swap(x_try.values);
        sol.x.derivatives.swap(x_try.derivatives);
        sol.J = J_try;
        step *= 1.3;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) throw Diverged("gradient_descent: no descent at minimum step size");

    history.push_back(sol.J);
    if (static_cast<int>(history.size()) > window) {
      const double then = history[history.size() - 1 - window];
      const double rel = std::abs(then - sol.J) / std::max(1e-300, std::abs(then));
      if (rel < opts.tol) {
        sol.converged = true;
        ++it;
        break;
      }
    }
  }
  sol.iterations = it;

  // Report the stationarity residual of the accepted iterate.
  sol.lambda = adjoint_sweep(pb, sol.x, sol.u);
  double res = 0.0;
  for (int k = 0; k < pb.grid.size(); ++k) {
    sys.B_into(sol.x.values.col(k), Bx);
    const Eigen::VectorXd g =
        eps2 * (sol.u.values.col(k) - u0) + Bx.transpose() * sol.lambda.values.col(k);
    res = std::max(res, g.cwiseAbs().maxCoeff());
  }
  sol.stationarity_residual = res;
  sol.J = evaluate_functional(pb, sol.x, sol.u);
  return sol;
}

OptimalSolution exact_linear_tracking(double epsilon, double beta1, bool beta1_infinite,
                                      double beta2, double x0, double y0, double x1, double y1,
                                      const TimeGrid& grid) {
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw BadParameter("exact_linear_tracking: epsilon must lie in (0, 1/2)");
  if (beta1_infinite) beta1 = 1e12;

  const double disc = std::sqrt(1.0 - 4.0 * epsilon * epsilon);
  const double kappa1 = std::sqrt(1.0 - disc) / (std::sqrt(2.0) * epsilon);
  const double kappa2 = std::sqrt(1.0 + disc) / (std::sqrt(2.0) * epsilon);

  // Mode sigma has eigenvector (1, sigma, -1/sigma, -eps^2 sigma^2) of the
  // extended state matrix. Growing modes are anchored at t1 and decaying
  // ones at t0 so every basis function stays bounded by one on the interval.
  const double sig[4] = {kappa1, -kappa1, kappa2, -kappa2};
  const double e2 = epsilon * epsilon;
  auto mode = [&](int j, double t) -> Eigen::Vector4d {
    const double anchor = sig[j] > 0.0 ? grid.t1 : grid.t0;
    const double w = std::exp(sig[j] * (t - anchor));
    Eigen::Vector4d v;
    v << 1.0, sig[j], -1.0 / sig[j], -e2 * sig[j] * sig[j];
    return w * v;
  };

  // Boundary conditions: x(t0)=x0, y(t0)=y0, lambda_x(t1)=beta1(x(t1)-x1),
  // lambda_y(t1)=beta2(y(t1)-y1); the terminal rows are scaled by their
  // weights to keep the fit well conditioned for huge beta1.
  Eigen::Matrix4d Mfit;
  Eigen::Vector4d rhs;
  for (int j = 0; j < 4; ++j) {
    const Eigen::Vector4d v0 = mode(j, grid.t0);
    const Eigen::Vector4d v1 = mode(j, grid.t1);
    const double w1 = std::max(1.0, beta1), w2 = std::max(1.0, beta2);
    Mfit(0, j) = v0[0];
    Mfit(1, j) = v0[1];
    Mfit(2, j) = (v1[2] - beta1 * v1[0]) / w1;
    Mfit(3, j) = (v1[3] - beta2 * v1[1]) / w2;
  }
  rhs << x0, y0, -beta1 * x1 / std::max(1.0, beta1), -beta2 * y1 / std::max(1.0, beta2);

  Eigen::JacobiSVD<Eigen::Matrix4d> svd(Mfit, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double cond = svd.singularValues()[0] / svd.singularValues()[3];
  if (!std::isfinite(cond) || cond > 1e12)
    throw IllConditioned("exact_linear_tracking: boundary fit condition " + std::to_string(cond));
  const Eigen::Vector4d coeff = svd.solve(rhs);

  OptimalSolution sol;
  sol.x = Trajectory(grid, 2);
  sol.lambda = Trajectory(grid, 2);
  sol.u = Trajectory(grid, 1);
  for (int k = 0; k < grid.size(); ++k) {
    Eigen::Vector4d z = Eigen::Vector4d::Zero();
    for (int j = 0; j < 4; ++j) z += coeff[j] * mode(j, grid.time(k));
    sol.x.values.col(k) << z[0], z[1];
    sol.lambda.values.col(k) << z[2], z[3];
    sol.u.values(0, k) = -z[3] / e2;
  }
  sol.converged = true;

  TrackingProblem pb;
  pb.system = builtin_system("free-particle");
  pb.x_d = Trajectory(grid, 2);
  pb.S = Eigen::Matrix2d::Identity();
  pb.S1 = Eigen::Matrix2d::Zero();
  pb.S1(0, 0) = beta1;
  pb.S1(1, 1) = beta2;
  pb.epsilon = epsilon;
  pb.x0 = Eigen::Vector2d(x0, y0);
  pb.x1 = Eigen::Vector2d(x1, y1);
  pb.grid = grid;
  sol.J = evaluate_functional(pb, sol.x, sol.u);
  sol.stationarity_residual = 0.0;
  return sol;
}

SingularControl singular_control_scalar(const AffineSystem& sys, const Eigen::MatrixXd& S,
                                        const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                                        const Eigen::VectorXd& x_d,
                                        const Eigen::VectorXd& xdot_d) {
  if (sys.p != 1)
    throw BadParameter("singular_control_scalar: needs a single-input system");
  const int n = sys.n;

  auto q_of = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    const Eigen::MatrixXd G = sys.gradB(v)[0];
    return G * sys.R(v) - sys.gradR(v) * sys.B(v).col(0);
  };
  const Eigen::VectorXd q = q_of(x);
  const Eigen::VectorXd B = sys.B(x).col(0);
  const Eigen::MatrixXd G = sys.gradB(x)[0];
  const Eigen::VectorXd R = sys.R(x);

  // Jacobian of q by central differences; q itself already carries the
  // analytic first derivatives of R and B.
  Eigen::MatrixXd gradq(n, n);
  const double h = 1e-6;
  Eigen::VectorXd vp = x, vm = x;
  for (int j = 0; j < n; ++j) {
    vp[j] = x[j] + h;
    vm[j] = x[j] - h;
    gradq.col(j) = (q_of(vp) - q_of(vm)) / (2.0 * h);
    vp[j] = x[j];
    vm[j] = x[j];
  }

  SingularControl out;
  out.q = q;
  out.convexity = B.dot(S * B) + (x - x_d).dot(S * (G * B)) - lambda.dot(gradq * B - G * q);
  const double scale = std::max(1.0, B.dot(S * B));
  if (std::abs(out.convexity) < 1e-12 * scale)
    throw SingularSurfaceDegenerate("singular_control_scalar: u-coefficient vanishes");
  const double numer = lambda.dot(gradq * R - sys.gradR(x) * q) + B.dot(S * (xdot_d - R)) -
                       (x - x_d).dot(S * (G * R + q));
  out.u = numer / out.convexity;
  return out;
}

}  // namespace act
