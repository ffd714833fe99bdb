#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace act {

/// Affine control system xdot = R(x) + B(x) u with full-column-rank coupling.
/// gradB is stored as one n x n matrix per control channel j with entries
/// (i,l) = d B(i,j) / d x_l; that layout contracts directly against both
/// B+ (stability matrix) and the co-state (adjoint equation).
struct AffineSystem {
  int n = 0;
  int p = 0;
  std::string name;

  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> R_into;
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)> B_into;
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)> gradR_into;
  std::function<void(const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>&)> gradB_into;

  Eigen::VectorXd R(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(n);
    R_into(x, out);
    return out;
  }
  Eigen::MatrixXd B(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out(n, p);
    B_into(x, out);
    return out;
  }
  Eigen::MatrixXd gradR(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd out(n, n);
    gradR_into(x, out);
    return out;
  }
  std::vector<Eigen::MatrixXd> gradB(const Eigen::VectorXd& x) const {
    std::vector<Eigen::MatrixXd> out;
    gradB_into(x, out);
    return out;
  }
};

/// Installs central finite-difference Jacobians for any of gradR_into /
/// gradB_into left empty.
void fill_fd_jacobians(AffineSystem& sys, double h = 1e-6);

/// Per-component reference functions of time. Components with
/// prescribed[i] == true carry user data (value + first derivative); the
/// rest are produced by the constraint solver.
struct DesiredTrajectory {
  struct Component {
    std::function<double(double)> value;
    std::function<double(double)> derivative;  // may be empty: finite differences
  };
  std::vector<Component> components;
  std::vector<bool> prescribed;

  explicit DesiredTrajectory(int n) : components(n), prescribed(n, false) {}
  int dim() const { return static_cast<int>(components.size()); }
  int prescribed_count() const {
    int c = 0;
    for (bool b : prescribed) c += b ? 1 : 0;
    return c;
  }
  void set(int i, std::function<double(double)> value,
           std::function<double(double)> derivative = nullptr) {
    components[i].value = std::move(value);
    components[i].derivative = std::move(derivative);
    prescribed[i] = true;
  }
};

using ParamMap = std::map<std::string, double>;

/// Example systems with their published parameters; `overrides` replaces
/// entries of the default parameter map (key "param" style, e.g. "a0").
AffineSystem builtin_system(const std::string& name, const ParamMap& overrides = {});

/// Default parameter map of a builtin (after overrides), for reporting.
ParamMap builtin_parameters(const std::string& name, const ParamMap& overrides = {});

/// True when the projectors are state independent and Q R(x) is affine in x,
/// checked numerically on probe states.
bool satisfies_linearizing_assumption(const AffineSystem& sys, double tol = 1e-8);

/// Affine part (A, b) of Q R(x) = Q A x + Q b, extracted numerically:
/// A columns from Q (R(e_i) - R(0)), b = R(0). Throws BadParameter when the
/// extraction does not reproduce Q R at probe states.
void linear_constraint_part(const AffineSystem& sys, Eigen::MatrixXd& QA, Eigen::VectorXd& Qb,
                            double tol = 1e-8);

}  // namespace act
