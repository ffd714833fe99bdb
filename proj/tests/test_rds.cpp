#include <doctest.h>

#include <cmath>

#include "act/errors.hpp"
#include "act/projectors.hpp"
#include "act/rds.hpp"

using namespace act;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

RDSystem schloegl_rds(double D = 1.0) {
  RDSystem sys;
  sys.base = builtin_system("schloegl-kinetics");
  sys.D = VectorXd::Constant(1, D);
  return sys;
}

double trapezoid_mass(const Eigen::MatrixXd& frame, const RDGrid& grid) {
  double mass = frame.row(0).sum();
  if (grid.bc == BoundaryKind::Neumann)
    mass -= 0.5 * (frame(0, 0) + frame(0, grid.N - 1));
  return mass * grid.dx();
}

}  // namespace

TEST_CASE("method-of-lines integrator") {
  SUBCASE("homogeneous steady state is stationary") {
    RDSystem sys = schloegl_rds();
    const RDGrid grid(50.0, 128, BoundaryKind::Periodic);
    Eigen::MatrixXd state0 = Eigen::MatrixXd::Constant(1, grid.N, 1.0);  // root x0
    const TimeGrid tspan(0.0, 1.0, 1000);
    const RDField out = rd_integrate(sys, grid, nullptr, state0, tspan, 1000);
    CHECK((out.frames.back().array() - 1.0).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("pure diffusion conserves the discrete mean on a ring") {
    RDSystem sys = schloegl_rds();
    sys.base.R_into = [](const VectorXd&, VectorXd& out) { out.setZero(); };
    const RDGrid grid(10.0, 64, BoundaryKind::Periodic);
    Eigen::MatrixXd state0(1, grid.N);
    for (int i = 0; i < grid.N; ++i) state0(0, i) = std::sin(2.0 * M_PI * i / grid.N) + 2.0;
    const TimeGrid tspan(0.0, 0.5, 2000);
    const RDField out = rd_integrate(sys, grid, nullptr, state0, tspan, 2000);
    CHECK(out.frames.back().mean() == doctest::Approx(state0.mean()).epsilon(1e-12));
  }
  SUBCASE("walls carry zero flux: trapezoid mass is conserved") {
    RDSystem sys = schloegl_rds();
    sys.base.R_into = [](const VectorXd&, VectorXd& out) { out.setZero(); };
    const RDGrid grid(10.0, 64, BoundaryKind::Neumann);
    Eigen::MatrixXd state0(1, grid.N);
    for (int i = 0; i < grid.N; ++i) state0(0, i) = std::cos(3.0 * M_PI * i / (grid.N - 1.0));
    const TimeGrid tspan(0.0, 0.5, 2000);
    const RDField out = rd_integrate(sys, grid, nullptr, state0, tspan, 200);
    for (const auto& frame : out.frames)
      CHECK(trapezoid_mass(frame, grid) ==
            doctest::Approx(trapezoid_mass(state0, grid)).epsilon(1e-12));
  }
  SUBCASE("explicit stability precondition") {
    RDSystem sys = schloegl_rds();
    const RDGrid grid(10.0, 256, BoundaryKind::Periodic);
    Eigen::MatrixXd state0 = Eigen::MatrixXd::Constant(1, grid.N, 1.0);
    CHECK_THROWS_AS(rd_integrate(sys, grid, nullptr, state0, TimeGrid(0.0, 1.0, 100)),
                    StabilityViolated);
  }
}

TEST_CASE("analytical bistable front") {
  const double k = 1.0, x0 = 1.0, x1 = 2.0, x2 = 4.0, D = 1.0;
  const WaveProfile front = schloegl_front(k, x0, x1, x2, D);

  CHECK(front.at(0.0)[0] == doctest::Approx(0.5 * (x0 + x2)).epsilon(1e-9));
  CHECK(front.at(35.0)[0] == doctest::Approx(x0).epsilon(1e-9));
  CHECK(front.at(-35.0)[0] == doctest::Approx(x2).epsilon(1e-9));
  CHECK(front.c == doctest::Approx(std::sqrt(D * k / 2.0) * (x0 + x2 - 2.0 * x1)));

  SUBCASE("symmetric roots give a standing front") {
    const WaveProfile still = schloegl_front(k, 1.0, 2.5, 4.0, D);
    CHECK(still.c == doctest::Approx(0.0));
  }
  SUBCASE("profile equation residual on the sample grid") {
    const AffineSystem kin = builtin_system("schloegl-kinetics");
    const double h = front.xi[1] - front.xi[0];
    auto val = [&](int i) { return front.values(0, i); };
    for (int i = 1000; i < 3000; i += 250) {
      const double d1 = (-val(i + 2) + 8 * val(i + 1) - 8 * val(i - 1) + val(i - 2)) /
                        (12.0 * h);
      const double d2 = (-val(i + 2) + 16 * val(i + 1) - 30 * val(i) + 16 * val(i - 1) -
                         val(i - 2)) /
                        (12.0 * h * h);
      const double res = D * d2 + front.c * d1 + kin.R(VectorXd::Constant(1, val(i)))[0];
      CHECK(std::abs(res) < 1e-4);
    }
  }
  SUBCASE("bad roots are rejected") {
    CHECK_THROWS_AS(schloegl_front(k, 2.0, 1.0, 4.0, D), BadParameter);
  }
}

TEST_CASE("front speed measurement and spatial order") {
  const double k = 1.0, x0 = 1.0, x1 = 2.0, x2 = 4.0, D = 1.0;
  const WaveProfile front = schloegl_front(k, x0, x1, x2, D);

  auto measured_speed = [&](int N) {
    const RDGrid grid(100.0, N, BoundaryKind::Neumann);
    RDSystem sys = schloegl_rds();
    Eigen::MatrixXd state0(1, N);
    const double start = 30.0;
    for (int i = 0; i < N; ++i) state0(0, i) = front.at(grid.node(i) - start)[0];
    const double horizon = 20.0;
    const double dt_max = 0.4 * grid.dx() * grid.dx();
    const int steps = static_cast<int>(std::ceil(horizon / (0.9 * dt_max)));
    const TimeGrid tspan(0.0, horizon, steps);
    const RDField run = rd_integrate(sys, grid, nullptr, state0, tspan, steps);
    const double pos0 =
        measure_position(state0.row(0).transpose(), grid, PositionMethod::SteepestSlope);
    const double pos1 = measure_position(run.frames.back().row(0).transpose(), grid,
                                         PositionMethod::SteepestSlope);
    return (pos1 - pos0) / horizon;
  };

  const double c_exact = front.c;
  const double c_coarse = measured_speed(1000);  // dx = 0.1
  CHECK(std::abs(c_coarse - c_exact) / std::abs(c_exact) < 0.01);

  const double c_fine = measured_speed(2000);  // dx = 0.05
  const double ratio = std::abs(c_coarse - c_exact) / std::abs(c_fine - c_exact);
  CHECK(ratio > 2.0);  // second-order stencil: expect about 4x
  CHECK(ratio < 8.0);
}

TEST_CASE("position measurement") {
  // A front profile is not ring compatible; measure on a walled domain.
  const RDGrid grid(100.0, 1000, BoundaryKind::Neumann);
  const WaveProfile front = schloegl_front(1.0, 1.0, 2.0, 4.0, 1.0);

  auto snapshot_at = [&](double center) {
    VectorXd snap(grid.N);
    for (int i = 0; i < grid.N; ++i) snap[i] = front.at(grid.node(i) - center)[0];
    return snap;
  };

  SUBCASE("inflection point of the exact front") {
    const double pos = measure_position(snapshot_at(42.37), grid, PositionMethod::SteepestSlope);
    CHECK(std::abs(pos - 42.37) < grid.dx() / 10.0);
  }
  SUBCASE("shifting the snapshot shifts the measurement") {
    const double a = measure_position(snapshot_at(30.0), grid, PositionMethod::SteepestSlope);
    const double b = measure_position(snapshot_at(36.5), grid, PositionMethod::SteepestSlope);
    CHECK(b - a == doctest::Approx(6.5).epsilon(1e-6));
  }
  SUBCASE("robust to small additive perturbations") {
    VectorXd snap = snapshot_at(50.0);
    for (int i = 0; i < grid.N; ++i) snap[i] += 1e-3 * std::sin(0.77 * i);
    const double pos = measure_position(snap, grid, PositionMethod::SteepestSlope);
    CHECK(std::abs(pos - 50.0) < grid.dx() / 2.0);
  }
  SUBCASE("two equal extrema are ambiguous") {
    VectorXd snap = VectorXd::Zero(grid.N);
    for (int i = 0; i < grid.N; ++i) {
      const double r = grid.node(i);
      snap[i] = std::exp(-0.1 * std::pow(r - 25.0, 2)) + std::exp(-0.1 * std::pow(r - 75.0, 2));
    }
    CHECK_THROWS_AS(measure_position(snap, grid, PositionMethod::Max), Ambiguous);
  }
  SUBCASE("periodic unwrapping") {
    CHECK(unwrap_position(95.0, 3.0, 100.0) == doctest::Approx(103.0));
    CHECK(unwrap_position(5.0, 97.0, 100.0) == doctest::Approx(-3.0));
    CHECK(unwrap_position(50.0, 51.0, 100.0) == doctest::Approx(51.0));
  }
}

TEST_CASE("smooth-start sinusoidal protocol") {
  const double c = 0.7071, A = 10.0, T = 50.0, phi0 = 50.0, t0 = 2.0;
  const Protocol proto = sinusoidal_protocol_smooth_start(A, T, phi0, c, t0);
  CHECK(proto.phi(t0) == doctest::Approx(phi0).epsilon(1e-12));
  CHECK(proto.phidot(t0) == doctest::Approx(c).epsilon(1e-12));
  CHECK_THROWS_AS(sinusoidal_protocol_smooth_start(0.1, 50.0, phi0, c, t0), BadParameter);
}

TEST_CASE("position control of the bistable front") {
  const double k = 1.0, x0r = 1.0, x1r = 2.0, x2r = 4.0, D = 1.0;
  const WaveProfile front = schloegl_front(k, x0r, x1r, x2r, D);
  RDSystem sys = schloegl_rds();
  const RDGrid grid(100.0, 1000, BoundaryKind::Neumann);
  const TimeGrid tspan(0.0, 1.0, 300);

  SUBCASE("protocol moving with the natural speed needs no control") {
    Protocol natural;
    natural.phi = [&](double t) { return 50.0 + front.c * t; };
    natural.phidot = [&](double) { return front.c; };
    const PositionControl pc = position_control_signal(
        sys, front, natural, PositionRecipe::SchloeglMultiplicative, grid, tspan);
    for (const auto& frame : pc.u.frames) CHECK(frame.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("pointwise algebra of the multiplicative recipe") {
    const Protocol proto = sinusoidal_protocol_smooth_start(10.0, 50.0, 50.0, front.c, 0.0);
    const PositionControl pc = position_control_signal(
        sys, front, proto, PositionRecipe::SchloeglMultiplicative, grid, tspan);
    // Oracle: (c - phidot) X'(r - phi) / B(X(r - phi)) with the analytic
    // tanh profile.
    const double slope = std::sqrt(k / D) * (x2r - x0r) / (2.0 * std::sqrt(2.0));
    for (int kk : {0, 120, 300}) {
      const double t = tspan.time(kk);
      for (int i : {300, 500, 700}) {
        const double xi = grid.node(i) - proto.phi(t);
        const double X = 0.5 * (x0r + x2r) + 0.5 * (x0r - x2r) * std::tanh(slope * xi);
        const double Xp = 0.5 * (x0r - x2r) * slope /
                          std::pow(std::cosh(slope * xi), 2);
        const double wantU = (front.c - proto.phidot(t)) * Xp / (k * X * X);
        CHECK(pc.u.frames[kk](0, i) == doctest::Approx(wantU).epsilon(1e-7));
      }
    }
  }
  SUBCASE("generic synththesis agrees with the recipe on the shifted profile") {
    const Protocol proto = sinusoidal_protocol_smooth_start(10.0, 50.0, 50.0, front.c, 0.0);
    RDField xd;
    xd.grid = grid;
    xd.tspan = tspan;
    xd.frames.resize(tspan.size());
    for (int kk = 0; kk < tspan.size(); ++kk) {
      xd.frames[kk].resize(1, grid.N);
      for (int i = 0; i < grid.N; ++i)
        xd.frames[kk](0, i) = front.at(grid.node(i) - proto.phi(tspan.time(kk)))[0];
    }
    const RDField u_gen = rds_synthesize_control(sys, xd);
    const PositionControl pc = position_control_signal(
        sys, front, proto, PositionRecipe::SchloeglMultiplicative, grid, tspan);
    // Finite differences in time and space limit the agreement.
    double worst = 0.0;
    for (int kk = 1; kk + 1 < tspan.size(); ++kk)
      worst = std::max(worst,
                       (u_gen.frames[kk].middleCols(5, grid.N - 10) -
                        pc.u.frames[kk].middleCols(5, grid.N - 10))
                           .cwiseAbs()
                           .maxCoeff());
    CHECK(worst < 5e-3);
  }
}

TEST_CASE("generic distribution control") {
  SUBCASE("uncontrolled solutions synthesize a near-zero control") {
    RDSystem sys = schloegl_rds();
    const RDGrid grid(50.0, 256, BoundaryKind::Periodic);
    Eigen::MatrixXd state0(1, grid.N);
    for (int i = 0; i < grid.N; ++i)
      state0(0, i) = 2.0 + std::sin(2.0 * M_PI * grid.node(i) / grid.L);
    const double dt_max = 0.4 * grid.dx() * grid.dx();
    const int steps = static_cast<int>(std::ceil(1.0 / (0.9 * dt_max)));
    const TimeGrid tspan(0.0, 1.0, steps);
    const RDField sol = rd_integrate(sys, grid, nullptr, state0, tspan);
    const RDField u = rds_synthesize_control(sys, sol);
    double worst = 0.0;
    for (size_t kk = 1; kk + 1 < u.frames.size(); ++kk)
      worst = std::max(worst, u.frames[kk].cwiseAbs().maxCoeff());
    CHECK(worst < 5e-3);  // O(dt^2 + dx^2) discretization error
  }
  SUBCASE("control vanishes exactly outside the actuation window") {
    RDSystem sys = schloegl_rds();
    const RDGrid grid(50.0, 128, BoundaryKind::Periodic);
    sys.chi = [&](double r) {
      return VectorXd::Constant(1, (r >= 10.0 && r <= 30.0) ? 1.0 : 0.0);
    };
    RDField xd;
    xd.grid = grid;
    xd.tspan = TimeGrid(0.0, 0.1, 4);
    xd.frames.assign(5, Eigen::MatrixXd::Constant(1, grid.N, 2.0));
    for (int kk = 0; kk < 5; ++kk)
      for (int i = 0; i < grid.N; ++i)
        xd.frames[kk](0, i) += 0.1 * std::sin(2.0 * M_PI * grid.node(i) / grid.L + 0.2 * kk);
    const RDField u = rds_synthesize_control(sys, xd);
    for (int i = 0; i < grid.N; ++i) {
      const bool inside = grid.node(i) >= 10.0 && grid.node(i) <= 30.0;
      if (!inside)
        for (const auto& frame : u.frames) CHECK(frame(0, i) == 0.0);
    }
    // Inside the window the control is active.
    CHECK(u.frames[2].cwiseAbs().maxCoeff() > 1e-3);
  }
}

TEST_CASE("pulse profile extraction and position control recipe" *
          doctest::timeout(1200)) {
  const RDGrid grid(150.0, 1024, BoundaryKind::Periodic);
  const ParamMap params = {{"a0", 0.429}, {"a1", 0.0}, {"a2", 0.33},
                           {"Dx", 0.3},   {"Dy", 1.0}};
  FhnWaveOptions opts;
  opts.settle_time = 300.0;
  const WaveProfile pulse = fhn_wave_profile(params, grid, opts);

  CHECK(pulse.c > 0.1);  // rightward pulse exists

  SUBCASE("discrete profile-equation residual") {
    // D X'' + c X' + R(X) on the extracted samples. The diffusion term uses
    // the integrator stencil (the settled field satisfies it exactly); the
    // advection term takes a 4th-order first derivative.
    const double h = grid.dx();
    auto d1 = [&](int row, int i) {
      // 6th-order centered stencil keeps the advection-term truncation well
      // below the residual budget at the steep pulse back.
      return (pulse.values(row, i + 3) - 9 * pulse.values(row, i + 2) +
              45 * pulse.values(row, i + 1) - 45 * pulse.values(row, i - 1) +
              9 * pulse.values(row, i - 2) - pulse.values(row, i - 3)) /
             (60.0 * h);
    };
    auto lap = [&](int row, int i) {
      return (pulse.values(row, i + 1) - 2 * pulse.values(row, i) +
              pulse.values(row, i - 1)) /
             (h * h);
    };
    double worst = 0.0;
    for (int i = 3; i + 3 < pulse.xi.size(); ++i) {
      const Eigen::VectorXd v = pulse.values.col(i);
      const double rx = 0.3 * lap(0, i) + pulse.c * d1(0, i) + (0.429 + 0.33 * v[1]);
      const double ry =
          1.0 * lap(1, i) + pulse.c * d1(1, i) + (3.0 * v[1] - v[1] * v[1] * v[1] - v[0]);
      worst = std::max({worst, std::abs(rx), std::abs(ry)});
    }
    CHECK(worst < 1e-3);
  }
  SUBCASE("translation invariance of the residual") {
    auto residual = [&](const Eigen::MatrixXd& vals) {
      const double h = grid.dx();
      double worst = 0.0;
      for (int i = 1; i + 1 < vals.cols(); ++i) {
        const double d2 = (vals(1, i + 1) - 2.0 * vals(1, i) + vals(1, i - 1)) / (h * h);
        const double d1 = (vals(1, i + 1) - vals(1, i - 1)) / (2.0 * h);
        worst = std::max(worst, std::abs(d2 + pulse.c * d1 +
                                         (3.0 * vals(1, i) - std::pow(vals(1, i), 3) -
                                          vals(0, i))));
      }
      return worst;
    };
    Eigen::MatrixXd shifted(2, pulse.values.cols());
    const int n = static_cast<int>(pulse.values.cols());
    for (int i = 0; i < n; ++i) shifted.col(i) = pulse.values.col((i + 1) % n);
    // Interior residual is unchanged by shifting the sample window.
    CHECK(std::abs(residual(shifted.middleCols(2, n - 4)) -
                   residual(pulse.values.middleCols(2, n - 4))) < 1e-10);
  }
  SUBCASE("natural protocol yields zero control and zero auxiliary drive") {
    RDSystem sys = fhn_rds_system(params);
    Protocol natural;
    natural.phi = [&](double t) { return 75.0 + pulse.c * t; };
    natural.phidot = [&](double) { return pulse.c; };
    const double dt_max = 0.4 * grid.dx() * grid.dx();
    const int steps = static_cast<int>(std::ceil(2.0 / (0.9 * dt_max)));
    const PositionControl pc = position_control_signal(
        sys, pulse, natural, PositionRecipe::FhnActivator, grid, TimeGrid(0.0, 2.0, steps));
    for (const auto& frame : pc.u.frames) CHECK(frame.cwiseAbs().maxCoeff() < 1e-12);
    for (const auto& frame : pc.x_hat.frames) CHECK(frame.cwiseAbs().maxCoeff() < 1e-12);
  }
}
