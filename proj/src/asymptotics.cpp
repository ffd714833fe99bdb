#include "act/asymptotics.hpp"

#include <cmath>

#include "act/errors.hpp"
#include "act/linear_flow.hpp"

namespace act {

double Problem2D::phi1() const {
  return std::sqrt(a1 * a1 * s2 + a2 * a2 * s1) / std::sqrt(s2);
}

double LayerSolution::at(double t) const {
  if (t <= 0.0) return y[0];
  if (t >= tau_max()) return target;
  const double h = tau[1] - tau[0];
  const double s = t / h;
  const int k = static_cast<int>(s);
  const double w = s - k;
  return (1.0 - w) * y[k] + w * y[k + 1];
}

namespace {

struct OuterForcing {
  const Problem2D* pb;
  Eigen::VectorXd operator()(double t) const {
    Eigen::VectorXd f(2);
    f[0] = pb->a0;
    f[1] = pb->y_d_dot(t) + pb->a1 * pb->y_d(t) - (pb->a2 * pb->s1 / pb->s2) * pb->x_d(t);
    return f;
  }
};

Eigen::Matrix2d outer_matrix(const Problem2D& pb) {
  Eigen::Matrix2d A;
  A << pb.a1, pb.a2, pb.a2 * pb.s1 / pb.s2, -pb.a1;
  return A;
}

// Matching constant y_init: the terminal condition on x transferred through
// the slow flow,
//   x_O(t1) = x1 + s2 / (beta1 a2) (y_d(t1) - y_O(t1)),
// solved with the same discrete propagator and trapezoid convolution that
// evaluate the outer solution itself. This keeps the two consistent to
// rounding (the shift identities of the a1 = 0 class then hold exactly) and
// makes the beta1 -> infinity flag a sharp condition instead of a large
// penalty.
double y_init_value(const Problem2D& pb, double beta1, bool beta1_infinite) {
  const Eigen::Matrix2d A = outer_matrix(pb);
  const Eigen::Matrix2d Phi = matrix_exp(A * (pb.grid.t1 - pb.grid.t0));
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
  const Trajectory conv_traj = solve_forced_linear(A, OuterForcing{&pb}, zero, pb.grid);
  const Eigen::VectorXd conv = conv_traj.values.col(pb.grid.steps);

  // x_O(t1) = Phi00 x0 + Phi01 yi + conv0, y_O(t1) = Phi10 x0 + Phi11 yi + conv1.
  const double w = beta1_infinite ? 0.0 : pb.s2 / (beta1 * pb.a2);
  const double denom = Phi(0, 1) + w * Phi(1, 1);
  const double rhs = pb.x1 + w * (pb.y_d(pb.grid.t1) - Phi(1, 0) * pb.x0 - conv[1]) -
                     Phi(0, 0) * pb.x0 - conv[0];
  if (std::abs(denom) < 1e-14 * std::max(1.0, Phi.cwiseAbs().maxCoeff()))
    throw DegenerateKappa("outer_solution: matching denominator vanishes");
  return rhs / denom;
}

// The thesis abbreviation for the matching denominator, reported for
// diagnostics.
double kappa_value(const Problem2D& pb, double beta1) {
  const double phi = pb.phi1();
  const double T = pb.grid.t1 - pb.grid.t0;
  return pb.s2 * phi * (pb.a2 * pb.a2 * beta1 - pb.a1 * pb.s2) * std::sinh(T * phi) +
         pb.s2 * pb.s2 * phi * phi * std::cosh(T * phi);
}

// Rate of the outer y-component from the reduced ODE; valid on any window.
double ydot_outer(const Problem2D& pb, double t, double xO, double yO) {
  return -pb.a1 * yO + (pb.a2 * pb.s1 / pb.s2) * xO + pb.y_d_dot(t) + pb.a1 * pb.y_d(t) -
         (pb.a2 * pb.s1 / pb.s2) * pb.x_d(t);
}

double outer_control(const Problem2D& pb, double t, double xO, double yO) {
  return (ydot_outer(pb, t, xO, yO) - pb.R(xO, yO)) / pb.b(xO, yO);
}

LayerSolution solve_layer(const Problem2D& pb, double x_frozen, double y_start, double target) {
  // e-folding bound: tau_max = ln(1e12) / (sqrt(s2) min|b|) with |b| probed
  // along the layer path.
  double bmin = std::numeric_limits<double>::infinity();
  const double lo = std::min(y_start, target), hi = std::max(y_start, target);
  const double pad = 0.1 * std::max(1.0, hi - lo);
  for (int k = 0; k <= 100; ++k) {
    const double y = lo - pad + (hi - lo + 2 * pad) * k / 100.0;
    bmin = std::min(bmin, std::abs(pb.b(x_frozen, y)));
  }
  if (!(bmin > 0.0)) throw BadParameter("inner_layers: coupling vanishes along the layer");
  const double rate = std::sqrt(pb.s2) * bmin;
  const double tau_max = std::log(1e12) / rate;

  const int m = 4000;
  LayerSolution sol;
  sol.tau.resize(m + 1);
  sol.y.resize(m + 1);
  sol.target = target;
  const double h = tau_max / m;
  double y = y_start;
  const double span = std::max(1.0, std::abs(y_start - target));
  for (int k = 0; k <= m; ++k) {
    sol.tau[k] = k * h;
    sol.y[k] = y;
    if (k == m) break;
    auto f = [&](double yy) { return std::sqrt(pb.s2) * (target - yy) * std::abs(pb.b(x_frozen, yy)); };
    const double k1 = f(y);
    const double k2 = f(y + 0.5 * h * k1);
    const double k3 = f(y + 0.5 * h * k2);
    const double k4 = f(y + h * k3);
    const double ynew = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    // The sign analysis forbids crossing the stationary target value.
    if ((target - ynew) * (target - y) < 0.0)
      y = target;
    else
      y = ynew;
  }
  if (std::abs(sol.y[m] - target) > 1e-9 * span)
    throw NoConvergence("inner_layers: layer did not relax onto the matching value");
  return sol;
}

}  // namespace

OuterSolution outer_solution(const Problem2D& pb) {
  if (pb.a2 == 0.0) throw BadParameter("outer_solution: a2 must not vanish");
  if (!(pb.phi1() > 0.0)) throw BadParameter("outer_solution: phi1 must be positive");

  OuterSolution out;
  out.y_init = y_init_value(pb, pb.beta1, pb.beta1_infinite);
  out.kappa = kappa_value(pb, pb.beta1_infinite ? 1e12 : pb.beta1);

  const Eigen::Matrix2d A = outer_matrix(pb);
  Eigen::VectorXd start(2);
  start << pb.x0, out.y_init;
  const Trajectory xy = solve_forced_linear(A, OuterForcing{&pb}, start, pb.grid);

  out.outer = Trajectory(pb.grid, 3);
  out.outer.derivatives.resize(3, pb.grid.size());
  for (int k = 0; k < pb.grid.size(); ++k) {
    const double t = pb.grid.time(k);
    const double xO = xy.values(0, k), yO = xy.values(1, k);
    out.outer.values(0, k) = xO;
    out.outer.values(1, k) = yO;
    out.outer.values(2, k) = (pb.s2 / pb.a2) * (pb.y_d(t) - yO);
    out.outer.derivatives(0, k) = xy.derivatives(0, k);
    out.outer.derivatives(1, k) = xy.derivatives(1, k);
    out.outer.derivatives(2, k) = (pb.s2 / pb.a2) * (pb.y_d_dot(t) - xy.derivatives(1, k));
  }
  out.y_end = out.outer.values(1, pb.grid.steps);
  return out;
}

std::pair<LayerSolution, LayerSolution> inner_layers(const Problem2D& pb, double y_init,
                                                     double y_end) {
  return {solve_layer(pb, pb.x0, pb.y0, y_init), solve_layer(pb, pb.x1, pb.y1, y_end)};
}

Composite2D composite_solution(const Problem2D& pb) {
  const OuterSolution outer = outer_solution(pb);
  auto [YL, YR] = inner_layers(pb, outer.y_init, outer.y_end);

  Composite2D out;
  out.y_init = outer.y_init;
  out.y_end = outer.y_end;
  out.kappa = outer.kappa;
  out.outer = outer.outer;
  out.YL = YL;
  out.YR = YR;
  out.epsilon = pb.epsilon;

  const double eps = pb.epsilon;
  const double roots2 = std::sqrt(pb.s2);
  const double ydot0 = outer.outer.derivatives(1, 0);
  const double ydot1 = outer.outer.derivatives(1, pb.grid.steps);
  const double uO_t0 = outer_control(pb, pb.grid.t0, pb.x0, outer.y_init);
  const double uO_t1 = outer_control(pb, pb.grid.t1, outer.outer.values(0, pb.grid.steps),
                                     outer.y_end);

  out.composite = Trajectory(pb.grid, 4);
  for (int k = 0; k < pb.grid.size(); ++k) {
    const double t = pb.grid.time(k);
    const double tauL = (t - pb.grid.t0) / eps;
    const double tauR = (pb.grid.t1 - t) / eps;
    const double xO = outer.outer.values(0, k), yO = outer.outer.values(1, k);
    const double yl = YL.at(tauL), yr = YR.at(tauR);

    out.composite.values(0, k) = xO;
    out.composite.values(1, k) = yO + yl - outer.y_init + yr - outer.y_end;
    out.composite.values(2, k) = outer.outer.values(2, k);

    const double bl = pb.b(pb.x0, yl);
    const double br = pb.b(pb.x1, yr);
    const double UL = (ydot0 - pb.R(pb.x0, yl)) / bl +
                      (roots2 / eps) * (bl >= 0.0 ? 1.0 : -1.0) * (outer.y_init - yl);
    const double UR = (ydot1 - pb.R(pb.x1, yr)) / br -
                      (roots2 / eps) * (br >= 0.0 ? 1.0 : -1.0) * (outer.y_end - yr);
    out.composite.values(3, k) = outer_control(pb, t, xO, yO) + UL + UR - uO_t0 - uO_t1;
  }
  return out;
}

Eps0Report eps0_limit(const Problem2D& pb) {
  const OuterSolution outer = outer_solution(pb);
  Eps0Report rep;
  rep.jump_left = outer.y_init - pb.y0;
  rep.kick_left = 2.0 * rep.jump_left;
  rep.jump_right = outer.y_end - pb.y1;
  rep.kick_right = 2.0 * rep.jump_right;
  rep.interior = Trajectory(pb.grid, 4);
  for (int k = 0; k < pb.grid.size(); ++k) {
    const double t = pb.grid.time(k);
    const double xO = outer.outer.values(0, k), yO = outer.outer.values(1, k);
    rep.interior.values(0, k) = xO;
    rep.interior.values(1, k) = yO;
    rep.interior.values(2, k) = outer.outer.values(2, k);
    rep.interior.values(3, k) = outer_control(pb, t, xO, yO);
  }
  return rep;
}

namespace {

// Matching constant for the infinite-horizon feedback law; the improper
// integral is truncated at 28 / phi1 e-foldings.
double y_init_infinity(const Problem2D& pb, double x, double t) {
  const double phi = pb.phi1();
  const double horizon = 28.0 / phi;
  const int m = 4000;
  const double h = horizon / m;
  Eigen::VectorXd samples(m + 1);
  for (int k = 0; k <= m; ++k) {
    const double tau = t + k * h;
    samples[k] = std::exp(-phi * (tau - t)) *
                 ((pb.a2 * pb.s1 / pb.s2) * pb.x_d(tau) - (pb.a1 + phi) * pb.y_d(tau));
  }
  const double integral = trapezoid(samples, h);
  if (!std::isfinite(integral))
    throw IntegralDiverged("feedback_law: matching integral is not finite");
  return integral - (phi + pb.a1) / pb.a2 * x - (pb.a0 / pb.a2) * (pb.a1 / phi + 1.0) +
         pb.y_d(t);
}

}  // namespace

double feedback_law(const Problem2D& pb, double x, double y, double t) {
  const double yinf = y_init_infinity(pb, x, t);
  const double bv = pb.b(x, y);
  double u = pb.a1 * (pb.y_d(t) - yinf) + pb.y_d_dot(t) +
             (pb.a2 * pb.s1 / pb.s2) * (x - pb.x_d(t));
  u += (std::sqrt(pb.s2) / pb.epsilon) * (yinf - y) * std::abs(bv);
  u -= pb.R(x, y);
  return u / bv;
}

double delayed_feedback_law(const Problem2D& pb, double x_delayed, double y_delayed, double t,
                            double delay) {
  if (!(delay > 0.0)) throw BadParameter("delayed_feedback_law: delay must be positive");
  // Substituted problem: measurement time t - T becomes the initial time,
  // the measured state the initial data.
  Problem2D sub = pb;
  const double t_start = t - delay;
  if (!(pb.grid.t1 > t_start))
    throw BadParameter("delayed_feedback_law: delayed window is empty");
  sub.x0 = x_delayed;
  sub.y0 = y_delayed;
  const int steps = std::max(64, static_cast<int>(std::ceil((pb.grid.t1 - t_start) /
                                                            pb.grid.dt())));
  sub.grid = TimeGrid(t_start, pb.grid.t1, steps);

  const OuterSolution outer = outer_solution(sub);
  auto [YL, YR] = inner_layers(sub, outer.y_init, outer.y_end);

  const double eps = pb.epsilon;
  const double roots2 = std::sqrt(pb.s2);
  const double ydot_start = outer.outer.derivatives(1, 0);
  const double ydot_end = outer.outer.derivatives(1, sub.grid.steps);
  const double uO_start = outer_control(sub, t_start, sub.x0, outer.y_init);
  const double uO_end =
      outer_control(sub, sub.grid.t1, outer.outer.values(0, sub.grid.steps), outer.y_end);

  // Outer values at the current time t.
  const Eigen::VectorXd now = outer.outer.at(t);
  const double uO_t = outer_control(sub, t, now[0], now[1]);

  const double tauL = delay / eps;
  const double tauR = (sub.grid.t1 - t) / eps;
  const double yl = YL.at(tauL), yr = YR.at(tauR);
  const double bl = sub.b(sub.x0, yl), br = sub.b(sub.x1, yr);
  const double UL = (ydot_start - sub.R(sub.x0, yl)) / bl +
                    (roots2 / eps) * (bl >= 0.0 ? 1.0 : -1.0) * (outer.y_init - yl);
  const double UR = (ydot_end - sub.R(sub.x1, yr)) / br -
                    (roots2 / eps) * (br >= 0.0 ? 1.0 : -1.0) * (outer.y_end - yr);
  return uO_t + UL + UR - uO_start - uO_end;
}

}  // namespace act
