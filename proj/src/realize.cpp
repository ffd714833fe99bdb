#include "act/realize.hpp"

#include <cmath>

#include "act/errors.hpp"
#include "act/integrate.hpp"
#include "act/linear_flow.hpp"
#include "act/projectors.hpp"

namespace act {

namespace {

// Coordinate selection matrices for the prescribed (masked) and free
// components.
void selection_matrices(const std::vector<bool>& mask, Eigen::MatrixXd& Em, Eigen::MatrixXd& Eu) {
  const int n = static_cast<int>(mask.size());
  int pm = 0;
  for (bool b : mask) pm += b ? 1 : 0;
  Em = Eigen::MatrixXd::Zero(n, pm);
  Eu = Eigen::MatrixXd::Zero(n, n - pm);
  int im = 0, iu = 0;
  for (int i = 0; i < n; ++i) {
    if (mask[i])
      Em(i, im++) = 1.0;
    else
      Eu(i, iu++) = 1.0;
  }
}

Eigen::VectorXd eval_prescribed(const DesiredTrajectory& desired, const std::vector<int>& idx,
                                double t) {
  Eigen::VectorXd v(idx.size());
  for (size_t j = 0; j < idx.size(); ++j) v[j] = desired.components[idx[j]].value(t);
  return v;
}

Eigen::VectorXd eval_prescribed_dot(const DesiredTrajectory& desired, const std::vector<int>& idx,
                                    double t, double h) {
  Eigen::VectorXd v(idx.size());
  for (size_t j = 0; j < idx.size(); ++j) {
    const auto& c = desired.components[idx[j]];
    v[j] = c.derivative ? c.derivative(t) : (c.value(t + h) - c.value(t - h)) / (2.0 * h);
  }
  return v;
}

}  // namespace

RealizationResult solve_constraint(const AffineSystem& sys, const DesiredTrajectory& desired,
                                   const Eigen::VectorXd& x0, const TimeGrid& grid,
                                   ConstraintPath path) {
  const int n = sys.n;
  if (desired.dim() != n) throw BadParameter("solve_constraint: desired dimension mismatch");
  if (desired.prescribed_count() != sys.p)
    throw BadParameter("solve_constraint: prescribed_mask must mark exactly p components");

  std::vector<int> masked, free_idx;
  for (int i = 0; i < n; ++i) (desired.prescribed[i] ? masked : free_idx).push_back(i);

  Eigen::MatrixXd Em, Eu;
  selection_matrices(desired.prescribed, Em, Eu);

  // The mask must select components spanning the range of P: checked on the
  // projectors at a regular state.
  Eigen::VectorXd probe = x0;
  if (sys.B(probe).cwiseAbs().maxCoeff() == 0.0) probe = Eigen::VectorXd::Ones(n);
  {
    const ProjectorPair pr = pseudo_inverse_projectors(sys.B(probe));
    if (matrix_rank(pr.P * Em) < sys.p || matrix_rank(pr.Q * Eu) < n - sys.p)
      throw BadParameter("solve_constraint: prescribed components do not span the range of P");
  }

  // Initial consistency of prescribed components with x0.
  const double fd_h = std::max(grid.dt() * 0.5, 1e-8);
  {
    const Eigen::VectorXd m0 = eval_prescribed(desired, masked, grid.t0);
    for (size_t j = 0; j < masked.size(); ++j)
      if (std::abs(m0[j] - x0[masked[j]]) >
          1e-9 * std::max(1.0, std::abs(x0[masked[j]])))
        throw InconsistentInitialState("solve_constraint: prescribed component " +
                                       std::to_string(masked[j]) + " mismatches x0 at t0");
  }

  const bool linearizing = satisfies_linearizing_assumption(sys);
  const bool use_linear =
      path == ConstraintPath::Linear || (path == ConstraintPath::Auto && linearizing);
  if (path == ConstraintPath::Linear && !linearizing)
    throw BadParameter("solve_constraint: linear path requires the linearizing assumption");

  const int nu = n - sys.p;
  Trajectory xu(grid, nu);

  if (use_linear) {
    Eigen::MatrixXd QA;
    Eigen::VectorXd Qb;
    linear_constraint_part(sys, QA, Qb);
    const ProjectorPair pr = pseudo_inverse_projectors(sys.B(probe));
    // Reduced linear system for the free coordinates:
    //   xu' = (Q Eu)+ Q A Eu xu + (Q Eu)+ (Q A Em xm(t) + Q b - Q Em xm'(t)).
    const Eigen::MatrixXd QEu_pinv = pseudo_inverse_projectors(pr.Q * Eu).Bplus;
    const Eigen::MatrixXd M = QEu_pinv * QA * Eu;
    const Eigen::MatrixXd Fm = QEu_pinv * QA * Em;
    const Eigen::MatrixXd Gm = QEu_pinv * pr.Q * Em;
    const Eigen::VectorXd c = QEu_pinv * Qb;
    auto forcing = [&](double t) -> Eigen::VectorXd {
      return Fm * eval_prescribed(desired, masked, t) + c -
             Gm * eval_prescribed_dot(desired, masked, t, fd_h);
    };
    Eigen::VectorXd xu0(nu);
    for (int j = 0; j < nu; ++j) xu0[j] = x0[free_idx[j]];
    xu = solve_forced_linear(M, forcing, xu0, grid);
  } else {
    Eigen::MatrixXd Bx(n, sys.p), Q(n, n);
    Eigen::VectorXd Rx(n), xfull(n);
    auto rhs = [&](double t, const Eigen::VectorXd& v, Eigen::VectorXd& dv) {
      const Eigen::VectorXd xm = eval_prescribed(desired, masked, t);
      for (size_t j = 0; j < masked.size(); ++j) xfull[masked[j]] = xm[j];
      for (int j = 0; j < nu; ++j) xfull[free_idx[j]] = v[j];
      sys.B_into(xfull, Bx);
      sys.R_into(xfull, Rx);
      const ProjectorPair pr = pseudo_inverse_projectors(Bx);
      const Eigen::VectorXd xmdot = eval_prescribed_dot(desired, masked, t, fd_h);
      dv = pseudo_inverse_projectors(pr.Q * Eu).Bplus * (pr.Q * Rx - pr.Q * (Em * xmdot));
    };
    Eigen::VectorXd xu0(nu);
    for (int j = 0; j < nu; ++j) xu0[j] = x0[free_idx[j]];
    xu = integrate_ivp(rhs, xu0, grid);
  }

  // Assemble the full trajectory with derivatives (prescribed: analytic or
  // finite differences; solved: the reduced ODE values).
  RealizationResult out;
  out.x_d = Trajectory(grid, n);
  out.x_d.derivatives.resize(n, grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const Eigen::VectorXd xm = eval_prescribed(desired, masked, t);
    const Eigen::VectorXd xmdot = eval_prescribed_dot(desired, masked, t, fd_h);
    for (size_t j = 0; j < masked.size(); ++j) {
      out.x_d.values(masked[j], k) = xm[j];
      out.x_d.derivatives(masked[j], k) = xmdot[j];
    }
    for (int j = 0; j < nu; ++j) {
      out.x_d.values(free_idx[j], k) = xu.values(j, k);
      out.x_d.derivatives(free_idx[j], k) = xu.derivatives(j, k);
    }
  }

  out.u = synthesize_control(sys, out.x_d);

  double res = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const Eigen::VectorXd x = out.x_d.values.col(k);
    const ProjectorPair pr = pseudo_inverse_projectors(sys.B(x));
    res = std::max(res,
                   (pr.Q * (out.x_d.derivatives.col(k) - sys.R(x))).cwiseAbs().maxCoeff());
  }
  out.residual = res;
  return out;
}

Trajectory synthesize_control(const AffineSystem& sys, const Trajectory& x_d) {
  const Eigen::MatrixXd xdot = x_d.derivative();
  Trajectory u(x_d.grid, sys.p);
  Eigen::MatrixXd Bx(sys.n, sys.p);
  Eigen::VectorXd Rx(sys.n);
  for (int k = 0; k < x_d.grid.size(); ++k) {
    const Eigen::VectorXd x = x_d.values.col(k);
    sys.B_into(x, Bx);
    sys.R_into(x, Rx);
    const ProjectorPair pr = pseudo_inverse_projectors(Bx);
    u.values.col(k) = pr.Bplus * (xdot.col(k) - Rx);
  }
  return u;
}

DeviationReport verify_tracking(const AffineSystem& sys, const Trajectory& u,
                                const Eigen::VectorXd& x0, const TimeGrid& grid,
                                const Trajectory& x_d) {
  Eigen::MatrixXd Bx(sys.n, sys.p);
  Eigen::VectorXd Rx(sys.n);
  auto rhs = [&](double t, const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    sys.R_into(x, Rx);
    sys.B_into(x, Bx);
    dx = Rx + Bx * u.at(t);
  };
  DeviationReport rep;
  rep.x = integrate_ivp(rhs, x0, grid);
  const Eigen::MatrixXd diff = (rep.x.values - x_d.values).cwiseAbs();
  rep.sup_per_component = diff.rowwise().maxCoeff();
  rep.final_error = diff.col(grid.steps);
  rep.sup = rep.sup_per_component.maxCoeff();
  return rep;
}

std::vector<Eigen::MatrixXd> stability_matrix(const AffineSystem& sys, const Trajectory& x_d) {
  const Eigen::MatrixXd xdot = x_d.derivative();
  std::vector<Eigen::MatrixXd> M;
  M.reserve(x_d.grid.size());
  for (int k = 0; k < x_d.grid.size(); ++k) {
    const Eigen::VectorXd x = x_d.values.col(k);
    const ProjectorPair pr = pseudo_inverse_projectors(sys.B(x));
    const Eigen::VectorXd c = pr.Bplus * (xdot.col(k) - sys.R(x));
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(sys.n, sys.n);
    const auto G = sys.gradB(x);
    for (int j = 0; j < sys.p; ++j) T += c[j] * G[j];
    M.push_back(sys.gradR(x) + T);
  }
  return M;
}

namespace {

double param_or(const ParamMap& par, const std::string& key, double fallback) {
  auto it = par.find(key);
  return it == par.end() ? fallback : it->second;
}

RealizationResult realize_fhn_mixed(const ParamMap& par, const ScalarSignal& z,
                                    const Eigen::VectorXd& x0, const TimeGrid& grid) {
  const double a0 = param_or(par, "a0", 0.056);
  const double a1 = param_or(par, "a1", -0.064);
  const double a2 = param_or(par, "a2", 0.08);
  const double c1 = param_or(par, "c1", 0.0);
  const double c2 = param_or(par, "c2", 1.0);
  if (c2 == 0.0) throw RecipePreconditionViolated("FhnMixedOutput: c2 must not vanish");

  // The output relation z = c1 x + c2 y turns the linear constraint into a
  // scalar forced ODE for x_d with rate a1 - a2 c1 / c2.
  const double kappa = a1 - a2 * c1 / c2;
  Eigen::MatrixXd A(1, 1);
  A(0, 0) = kappa;
  auto forcing = [&](double t) {
    return Eigen::VectorXd::Constant(1, a0 + (a2 / c2) * z.value(t));
  };
  Eigen::VectorXd xd0(1);
  xd0[0] = x0[0];
  if (std::abs(z.value(grid.t0) - (c1 * x0[0] + c2 * x0[1])) > 1e-9)
    throw InconsistentInitialState("FhnMixedOutput: z_d(t0) must equal c1 x0 + c2 y0");
  const Trajectory xd = solve_forced_linear(A, forcing, xd0, grid);

  RealizationResult out;
  out.x_d = Trajectory(grid, 2);
  out.x_d.derivatives.resize(2, grid.size());
  out.u = Trajectory(grid, 1);
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const double x = xd.values(0, k);
    const double xdot = xd.derivatives(0, k);
    const double y = (z.value(t) - c1 * x) / c2;
    const double ydot = (z.derivative(t) - c1 * xdot) / c2;
    out.x_d.values.col(k) << x, y;
    out.x_d.derivatives.col(k) << xdot, ydot;
    out.u.values(0, k) = ydot - (y - y * y * y / 3.0 - x);
  }
  out.residual = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const double x = out.x_d.values(0, k), y = out.x_d.values(1, k);
    out.residual = std::max(out.residual, std::abs(out.x_d.derivatives(0, k) -
                                                   (a0 + a1 * x + a2 * y)));
  }
  return out;
}

RealizationResult realize_sir_infected(const ParamMap& par, const std::optional<ScalarSignal>& z,
                                       const Eigen::VectorXd& x0, const TimeGrid& grid) {
  const double beta = param_or(par, "beta", 0.36);
  const double gamma = param_or(par, "gamma", 0.2);
  const double N = param_or(par, "N", x0.sum());
  const double S0 = x0[0], I0 = x0[1], R0 = x0[2];
  if (I0 <= 0.0 || S0 <= 0.0)
    throw RecipePreconditionViolated("SirInfected: need S(t0) > 0 and I(t0) > 0");

  // Designed parabola: z(t0) = I0, z(t1) = 0, and dz(t0) chosen so the
  // control starts from exactly zero.
  const bool designed = !z.has_value();
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  if (designed) {
    const double T = grid.t1 - grid.t0;
    b0 = I0;
    b1 = beta * I0 * S0 / N - gamma * I0;
    b2 = -(b0 + b1 * T) / (T * T);
  }
  auto zval = [&](double t) {
    if (!designed) return z->value(t);
    const double s = t - grid.t0;
    return b0 + b1 * s + b2 * s * s;
  };
  auto zdot = [&](double t) {
    if (!designed) return z->derivative(t);
    const double s = t - grid.t0;
    return b1 + 2.0 * b2 * s;
  };
  // Running integral of z: exact for the designed cubic antiderivative,
  // trapezoid otherwise.
  Eigen::VectorXd zint(grid.size());
  if (designed) {
    for (int k = 0; k < grid.size(); ++k) {
      const double s = grid.time(k) - grid.t0;
      zint[k] = b0 * s + 0.5 * b1 * s * s + b2 * s * s * s / 3.0;
    }
  } else {
    Eigen::VectorXd samples(grid.size());
    for (int k = 0; k < grid.size(); ++k) samples[k] = zval(grid.time(k));
    zint = cumulative_trapezoid(samples, grid.dt());
  }

  RealizationResult out;
  out.x_d = Trajectory(grid, 3);
  out.x_d.derivatives.resize(3, grid.size());
  out.u = Trajectory(grid, 1);
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const double zd = zval(t), zd_dot = zdot(t);
    const double Sd = S0 + I0 - zd - gamma * zint[k];
    const double Rd = R0 + gamma * zint[k];
    if (zd <= 0.0 && k < grid.size() - 1)
      throw RecipePreconditionViolated("SirInfected: z_d must stay positive on the interval");
    if (Sd <= 0.0)
      throw RecipePreconditionViolated("SirInfected: S_d reached zero, control undefined");
    out.x_d.values.col(k) << Sd, zd, Rd;
    out.x_d.derivatives.col(k) << -gamma * zd - zd_dot, zd_dot, gamma * zd;
    double u = (zd == 0.0) ? 0.0 : N * (gamma * zd + zd_dot) / (zd * Sd) - beta;
    if (u < -beta) {
      u = -beta;
      out.control_clipped = true;
    }
    out.u.values(0, k) = u;
  }
  if (designed) {
    // The design condition u(t0) = 0 holds algebraically; pin the boundary
    // sample after checking the evaluation agrees to rounding.
    if (std::abs(out.u.values(0, 0)) > 1e-10 * std::max(1.0, beta))
      throw RecipePreconditionViolated("SirInfected: designed parabola failed u(t0)=0");
    out.u.values(0, 0) = 0.0;
  }
  out.residual = 0.0;
  return out;
}

RealizationResult realize_fhn_activator_output(const ParamMap& par, const ScalarSignal& z,
                                               const Eigen::VectorXd& x0, const TimeGrid& grid) {
  const double a0 = param_or(par, "a0", 0.056);
  const double a1 = param_or(par, "a1", -0.064);
  const double a2 = param_or(par, "a2", 0.08);
  if (!z.second_derivative)
    throw RecipePreconditionViolated("FhnActivatorOutput: z_d needs a second derivative");
  auto Rcub = [](double y) { return y - y * y * y / 3.0; };
  auto Rcub_d = [](double y) { return 1.0 - y * y; };

  {
    const double want_x = Rcub(z.value(grid.t0)) - z.derivative(grid.t0);
    if (std::abs(x0[0] - want_x) > 1e-9 * std::max(1.0, std::abs(want_x)) ||
        std::abs(x0[1] - z.value(grid.t0)) > 1e-9)
      throw InconsistentInitialState(
          "FhnActivatorOutput: x0 must equal (R(z(t0)) - zdot(t0), z(t0))");
  }

  RealizationResult out;
  out.x_d = Trajectory(grid, 2);
  out.x_d.derivatives.resize(2, grid.size());
  out.u = Trajectory(grid, 1);
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid.time(k);
    const double zd = z.value(t), zdot = z.derivative(t), zddot = z.second_derivative(t);
    const double xd = Rcub(zd) - zdot;
    const double xdot = Rcub_d(zd) * zdot - zddot;
    out.x_d.values.col(k) << xd, zd;
    out.x_d.derivatives.col(k) << xdot, zdot;
    out.u.values(0, k) = xdot - a0 - a1 * xd - a2 * zd;
  }
  out.residual = 0.0;
  return out;
}

}  // namespace

RealizationResult realize_output(OutputRecipe recipe, const ParamMap& params,
                                 const std::optional<ScalarSignal>& z_d, const Eigen::VectorXd& x0,
                                 const TimeGrid& grid) {
  switch (recipe) {
    case OutputRecipe::FhnMixedOutput:
      if (!z_d) throw RecipePreconditionViolated("FhnMixedOutput: z_d required");
      return realize_fhn_mixed(params, *z_d, x0, grid);
    case OutputRecipe::SirInfected:
      return realize_sir_infected(params, z_d, x0, grid);
    case OutputRecipe::FhnActivatorOutput:
      if (!z_d) throw RecipePreconditionViolated("FhnActivatorOutput: z_d required");
      return realize_fhn_activator_output(params, *z_d, x0, grid);
  }
  throw BadParameter("realize_output: unknown recipe");
}

}  // namespace act
