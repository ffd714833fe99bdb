#include <cmath>

#include "act/affine_system.hpp"
#include "act/errors.hpp"
#include "act/projectors.hpp"

namespace act {

namespace {

ParamMap with_overrides(ParamMap defaults, const ParamMap& overrides) {
  for (const auto& [key, value] : overrides) {
    if (!defaults.count(key))
      throw BadParameter("builtin_system: unknown parameter '" + key + "'");
    defaults[key] = value;
  }
  return defaults;
}

// Two-variable systems of the shape xdot = a0 + a1 x + a2 y,
// ydot = R(x,y) + b(x,y) u cover the FHN and mechanical examples. The
// coupling b is either constant or the quadratic 11/4 + x^2 variant.
AffineSystem planar_system(const std::string& name, const ParamMap& par,
                           std::function<double(double, double)> force,
                           std::function<double(double, double)> force_dx,
                           std::function<double(double, double)> force_dy) {
  AffineSystem sys;
  sys.n = 2;
  sys.p = 1;
  sys.name = name;
  const double a0 = par.at("a0"), a1 = par.at("a1"), a2 = par.at("a2");
  const bool bq = par.at("b_quadratic") != 0.0;
  const double b0 = par.at("b0");
  if (!bq && b0 == 0.0) throw BadParameter(name + ": coupling b must not vanish");

  sys.R_into = [a0, a1, a2, force](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = a0 + a1 * x[0] + a2 * x[1];
    out[1] = force(x[0], x[1]);
  };
  sys.B_into = [bq, b0](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = 0.0;
    out(1, 0) = bq ? 11.0 / 4.0 + x[0] * x[0] : b0;
  };
  sys.gradR_into = [a1, a2, force_dx, force_dy](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = a1;
    out(0, 1) = a2;
    out(1, 0) = force_dx(x[0], x[1]);
    out(1, 1) = force_dy(x[0], x[1]);
  };
  sys.gradB_into = [bq](const Eigen::VectorXd& x, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(2, 2));
    if (bq) out[0](1, 0) = 2.0 * x[0];
  };
  return sys;
}

AffineSystem make_fhn_activator(const ParamMap& par) {
  return planar_system(
      "fhn-activator", par, [](double x, double y) { return y - y * y * y / 3.0 - x; },
      [](double, double) { return -1.0; }, [](double, double y) { return 1.0 - y * y; });
}

AffineSystem make_fhn_inhibitor(const ParamMap& par) {
  AffineSystem sys;
  sys.n = 2;
  sys.p = 1;
  sys.name = "fhn-inhibitor";
  const double a0 = par.at("a0"), a1 = par.at("a1"), a2 = par.at("a2");
  sys.R_into = [a0, a1, a2](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = a0 + a1 * x[0] + a2 * x[1];
    out[1] = x[1] - x[1] * x[1] * x[1] / 3.0 - x[0];
  };
  sys.B_into = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
    out(0, 0) = 1.0;
    out(1, 0) = 0.0;
  };
  sys.gradR_into = [a1, a2](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = a1;
    out(0, 1) = a2;
    out(1, 0) = -1.0;
    out(1, 1) = 1.0 - x[1] * x[1];
  };
  sys.gradB_into = [](const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(2, 2));
  };
  return sys;
}

AffineSystem make_fhn_both(const ParamMap& par) {
  AffineSystem sys;
  sys.n = 2;
  sys.p = 2;
  sys.name = "fhn-both";
  const double a0 = par.at("a0"), a1 = par.at("a1"), a2 = par.at("a2");
  sys.R_into = [a0, a1, a2](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = a0 + a1 * x[0] + a2 * x[1];
    out[1] = x[1] - x[1] * x[1] * x[1] / 3.0 - x[0];
  };
  sys.B_into = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setIdentity(); };
  sys.gradR_into = [a1, a2](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = a1;
    out(0, 1) = a2;
    out(1, 0) = -1.0;
    out(1, 1) = 1.0 - x[1] * x[1];
  };
  sys.gradB_into = [](const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>& out) {
    out.assign(2, Eigen::MatrixXd::Zero(2, 2));
  };
  return sys;
}

// Damped pendulum as the default external force of the 1-D mechanical system.
AffineSystem make_mechanical(const ParamMap& par) {
  const double gamma = par.at("gamma");
  return planar_system(
      "mechanical", par,
      [gamma](double x, double y) { return -gamma * y - std::sin(x); },
      [](double x, double) { return -std::cos(x); },
      [gamma](double, double) { return -gamma; });
}

AffineSystem make_free_particle(const ParamMap&) {
  AffineSystem sys;
  sys.n = 2;
  sys.p = 1;
  sys.name = "free-particle";
  sys.R_into = [](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = x[1];
    out[1] = 0.0;
  };
  sys.B_into = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
    out(0, 0) = 0.0;
    out(1, 0) = 1.0;
  };
  sys.gradR_into = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
    out.setZero();
    out(0, 1) = 1.0;
  };
  sys.gradB_into = [](const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(2, 2));
  };
  return sys;
}

AffineSystem make_diagonal_lti(const ParamMap& par) {
  AffineSystem sys;
  sys.n = 2;
  sys.p = 1;
  sys.name = "diagonal-lti";
  const double l1 = par.at("lambda1"), l2 = par.at("lambda2");
  sys.R_into = [l1, l2](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = l1 * x[0];
    out[1] = l2 * x[1];
  };
  sys.B_into = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) { out.setOnes(); };
  sys.gradR_into = [l1, l2](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
    out.setZero();
    out(0, 0) = l1;
    out(1, 1) = l2;
  };
  sys.gradB_into = [](const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(2, 2));
  };
  return sys;
}

AffineSystem make_sir(const ParamMap& par) {
  AffineSystem sys;
  sys.n = 3;
  sys.p = 1;
  sys.name = "sir";
  const double beta = par.at("beta"), gamma = par.at("gamma"), N = par.at("N");
  if (N <= 0.0) throw BadParameter("sir: population N must be positive");
  sys.R_into = [beta, gamma, N](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    const double si = x[0] * x[1] / N;
    out[0] = -beta * si;
    out[1] = beta * si - gamma * x[1];
    out[2] = gamma * x[1];
  };
  sys.B_into = [N](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    const double si = x[0] * x[1] / N;
    out(0, 0) = -si;
    out(1, 0) = si;
    out(2, 0) = 0.0;
  };
  sys.gradR_into = [beta, gamma, N](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out.setZero();
    out(0, 0) = -beta * x[1] / N;
    out(0, 1) = -beta * x[0] / N;
    out(1, 0) = beta * x[1] / N;
    out(1, 1) = beta * x[0] / N - gamma;
    out(2, 1) = gamma;
  };
  sys.gradB_into = [N](const Eigen::VectorXd& x, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(3, 3));
    out[0](0, 0) = -x[1] / N;
    out[0](0, 1) = -x[0] / N;
    out[0](1, 0) = x[1] / N;
    out[0](1, 1) = x[0] / N;
  };
  return sys;
}

// Linearized two-pendulums-on-a-cart model; the state ordering is
// (theta1, theta2, X, p1, p2, P).
AffineSystem make_cart_two_pendulums(const ParamMap& par) {
  AffineSystem sys;
  sys.n = 6;
  sys.p = 1;
  sys.name = "cart-two-pendulums";
  const double m1 = par.at("m1"), m2 = par.at("m2"), l1 = par.at("l1"), l2 = par.at("l2"),
               M = par.at("M"), g = par.at("g");
  if (l1 <= 0.0 || l2 <= 0.0 || M <= 0.0) throw BadParameter("cart-two-pendulums: bad geometry");

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6);
  A(0, 3) = 1.0;
  A(1, 4) = 1.0;
  A(2, 5) = 1.0 / M;
  A(3, 0) = g * (m1 + M) / (l1 * M);
  A(3, 1) = g * m2 / (l1 * M);
  A(4, 0) = g * m1 / (l2 * M);
  A(4, 1) = g * (m2 + M) / (l2 * M);
  A(5, 0) = -g * m1;
  A(5, 1) = -g * m2;
  Eigen::VectorXd Bv(6);
  Bv << 0.0, 0.0, 0.0, -1.0 / (l1 * M), -1.0 / (l2 * M), 1.0;

  sys.R_into = [A](const Eigen::VectorXd& x, Eigen::VectorXd& out) { out.noalias() = A * x; };
  sys.B_into = [Bv](const Eigen::VectorXd&, Eigen::MatrixXd& out) { out = Bv; };
  sys.gradR_into = [A](const Eigen::VectorXd&, Eigen::MatrixXd& out) { out = A; };
  sys.gradB_into = [](const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(6, 6));
  };
  return sys;
}

// Schloegl kinetics R(x) = -k (x-x0)(x-x1)(x-x2) with multiplicative
// coupling B(x) = k1p x^2; the bistable front substrate of the RDS module.
AffineSystem make_schloegl(const ParamMap& par) {
  AffineSystem sys;
  sys.n = 1;
  sys.p = 1;
  sys.name = "schloegl-kinetics";
  const double k = par.at("k"), x0 = par.at("x0"), x1 = par.at("x1"), x2 = par.at("x2"),
               k1p = par.at("k1p");
  if (!(0.0 < x0 && x0 < x1 && x1 < x2) || k <= 0.0)
    throw BadParameter("schloegl-kinetics: roots must satisfy 0 < x0 < x1 < x2 with k > 0");
  sys.R_into = [k, x0, x1, x2](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = -k * (x[0] - x0) * (x[0] - x1) * (x[0] - x2);
  };
  sys.B_into = [k1p](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = k1p * x[0] * x[0];
  };
  sys.gradR_into = [k, x0, x1, x2](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    const double a = x[0] - x0, b = x[0] - x1, c = x[0] - x2;
    out(0, 0) = -k * (a * b + a * c + b * c);
  };
  sys.gradB_into = [k1p](const Eigen::VectorXd& x, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(1, 1));
    out[0](0, 0) = 2.0 * k1p * x[0];
  };
  return sys;
}

ParamMap defaults_for(const std::string& name) {
  if (name == "fhn-activator" || name == "fhn-inhibitor" || name == "fhn-both")
    return {{"a0", 0.056}, {"a1", -0.064}, {"a2", 0.08}, {"b0", 1.0}, {"b_quadratic", 0.0}};
  if (name == "mechanical")
    return {{"a0", 0.0},  {"a1", 0.0},          {"a2", 1.0},
            {"b0", 1.0},  {"b_quadratic", 0.0}, {"gamma", 0.1}};
  if (name == "free-particle") return {};
  if (name == "diagonal-lti") return {{"lambda1", 1.0}, {"lambda2", 2.0}};
  if (name == "sir") return {{"beta", 0.36}, {"gamma", 0.2}, {"N", 1.0}};
  if (name == "cart-two-pendulums")
    return {{"m1", 0.5}, {"m2", 0.75}, {"l1", 1.0}, {"l2", 1.5}, {"M", 10.0}, {"g", 9.81}};
  if (name == "schloegl-kinetics")
    return {{"k", 1.0}, {"x0", 1.0}, {"x1", 2.0}, {"x2", 4.0}, {"k1p", 1.0}};
  throw UnknownSystem("builtin_system: unknown system '" + name + "'");
}

}  // namespace

ParamMap builtin_parameters(const std::string& name, const ParamMap& overrides) {
  return with_overrides(defaults_for(name), overrides);
}

AffineSystem builtin_system(const std::string& name, const ParamMap& overrides) {
  const ParamMap par = builtin_parameters(name, overrides);
  AffineSystem sys;
  if (name == "fhn-activator")
    sys = make_fhn_activator(par);
  else if (name == "fhn-inhibitor")
    sys = make_fhn_inhibitor(par);
  else if (name == "fhn-both")
    sys = make_fhn_both(par);
  else if (name == "mechanical")
    sys = make_mechanical(par);
  else if (name == "free-particle")
    sys = make_free_particle(par);
  else if (name == "diagonal-lti")
    sys = make_diagonal_lti(par);
  else if (name == "sir")
    sys = make_sir(par);
  else if (name == "cart-two-pendulums")
    sys = make_cart_two_pendulums(par);
  else if (name == "schloegl-kinetics")
    sys = make_schloegl(par);
  else
    throw UnknownSystem("builtin_system: unknown system '" + name + "'");
  return sys;
}

}  // namespace act
