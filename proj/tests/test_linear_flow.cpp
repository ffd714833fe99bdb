#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "act/linear_flow.hpp"

using namespace act;
using Eigen::MatrixXd;
using Eigen::VectorXd;

TEST_CASE("state transition matrix") {
  SUBCASE("zero generator") {
    const MatrixXd Phi = state_transition(MatrixXd::Zero(3, 3), 2.0, 1.0);
    CHECK((Phi - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("hyperbolic rotation") {
    MatrixXd A(2, 2);
    A << 0, 1, 1, 0;
    const MatrixXd Phi = state_transition(A, 1.0, 0.0);
    CHECK(Phi(0, 0) == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
    CHECK(Phi(0, 1) == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
    CHECK(Phi(1, 0) == doctest::Approx(std::sinh(1.0)).epsilon(1e-12));
    CHECK(Phi(1, 1) == doctest::Approx(std::cosh(1.0)).epsilon(1e-12));
  }
  SUBCASE("slow-system matrix has the cosh/sinh closed form") {
    const double a1 = -0.064, a2 = 0.08, s1 = 1.0, s2 = 2.0;
    MatrixXd A(2, 2);
    A << a1, a2, a2 * s1 / s2, -a1;
    const double phi1 = std::sqrt(a1 * a1 * s2 + a2 * a2 * s1) / std::sqrt(s2);
    const double dt = 0.7;
    const MatrixXd Phi = state_transition(A, dt, 0.0);
    CHECK(Phi(0, 0) ==
          doctest::Approx(std::cosh(dt * phi1) + a1 / phi1 * std::sinh(dt * phi1)).epsilon(1e-12));
    CHECK(Phi(0, 1) == doctest::Approx(a2 / phi1 * std::sinh(dt * phi1)).epsilon(1e-12));
    CHECK(Phi(1, 0) == doctest::Approx(a2 * s1 / (s2 * phi1) * std::sinh(dt * phi1)).epsilon(1e-12));
    CHECK(Phi(1, 1) ==
          doctest::Approx(std::cosh(dt * phi1) - a1 / phi1 * std::sinh(dt * phi1)).epsilon(1e-12));
  }
  SUBCASE("inverse and semigroup properties") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist;
    for (int trial = 0; trial < 20; ++trial) {
      MatrixXd A(4, 4);
      for (int i = 0; i < 16; ++i) A(i / 4, i % 4) = dist(rng);
      const MatrixXd a = state_transition(A, 0.9, 0.2);
      const MatrixXd b = state_transition(A, 0.2, 0.9);
      CHECK((a * b - MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
      const MatrixXd c = state_transition(A, 1.4, 0.9);
      const MatrixXd d = state_transition(A, 1.4, 0.2);
      CHECK((c * a - d).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("forced linear solve") {
  SUBCASE("no forcing propagates the initial state") {
    MatrixXd A(2, 2);
    A << 0, 1, -1, 0;
    const VectorXd x0 = Eigen::Vector2d(1.0, -0.5);
    const TimeGrid grid(0.0, 2.0, 100);
    const Trajectory sol = solve_forced_linear(
        A, [](double) { return Eigen::Vector2d::Zero().eval(); }, x0, grid);
    for (int k : {0, 50, 100}) {
      const VectorXd want = state_transition(A, grid.time(k), 0.0) * x0;
      CHECK((sol.values.col(k) - want).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("constraint solve for a constant desired activator") {
    // xdot = a1 x + a2 c + a0 has the closed form used as oracle.
    const double a0 = 0.056, a1 = -0.064, a2 = 0.08, c = 0.8, x00 = 0.3;
    const TimeGrid grid(0.0, 3.0, 3000);
    const Trajectory sol = solve_forced_linear(
        MatrixXd::Constant(1, 1, a1),
        [&](double) { return Eigen::VectorXd::Constant(1, a0 + a2 * c).eval(); },
        VectorXd::Constant(1, x00), grid);
    for (int k : {0, 1500, 3000}) {
      const double t = grid.time(k);
      const double want = a0 / a1 * (std::exp(a1 * t) - 1.0) + std::exp(a1 * t) * x00 +
                          a2 * c * (std::exp(a1 * t) - 1.0) / a1;
      CHECK(sol.values(0, k) == doctest::Approx(want).epsilon(1e-10));
    }
  }
  SUBCASE("vanishing decay-rate limit") {
    // a1 -> 0: x(t) = a0 t + x0 + a2 int y_d.
    const double a0 = 0.056, a2 = 0.08;
    const TimeGrid grid(0.0, 1.0, 2000);
    auto yd = [](double t) { return std::sin(3.0 * t); };
    const Trajectory sol = solve_forced_linear(
        MatrixXd::Zero(1, 1),
        [&](double t) { return Eigen::VectorXd::Constant(1, a0 + a2 * yd(t)).eval(); },
        VectorXd::Zero(1), grid);
    const double t = 1.0;
    const double want = a0 * t + a2 * (1.0 - std::cos(3.0 * t)) / 3.0;
    CHECK(sol.values(0, grid.steps) == doctest::Approx(want).epsilon(1e-6));
  }
  SUBCASE("quadrature refinement tightens the trapezoid error") {
    MatrixXd A(1, 1);
    A << -1.0;
    auto f = [](double t) { return Eigen::VectorXd::Constant(1, std::sin(10.0 * t)).eval(); };
    const TimeGrid grid(0.0, 1.0, 50);
    const double exact = (10.0 * std::exp(-1.0) - 10.0 * std::cos(10.0) + std::sin(10.0)) / 101.0;
    const double coarse = std::abs(
        solve_forced_linear(A, f, VectorXd::Zero(1), grid, 1).values(0, 50) - exact);
    const double fine = std::abs(
        solve_forced_linear(A, f, VectorXd::Zero(1), grid, 4).values(0, 50) - exact);
    CHECK(fine < coarse / 8.0);
  }
}
