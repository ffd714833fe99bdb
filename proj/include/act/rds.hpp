#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "act/affine_system.hpp"
#include "act/time_grid.hpp"

namespace act {

enum class BoundaryKind { Periodic, Neumann };

/// Equispaced 1-D grid with nodes r_i = i * dx, i = 0..N-1.
struct RDGrid {
  double L = 100.0;
  int N = 1000;
  BoundaryKind bc = BoundaryKind::Periodic;

  RDGrid() = default;
  RDGrid(double L_, int N_, BoundaryKind bc_);
  double dx() const { return L / N; }
  double node(int i) const { return i * dx(); }
};

/// Reaction-diffusion system: local kinetics plus diagonal diffusion, with a
/// per-component actuation indicator chi(r) restricting where the control
/// acts.
struct RDSystem {
  AffineSystem base;
  Eigen::VectorXd D;  // n diagonal diffusion coefficients, >= 0
  std::function<Eigen::VectorXd(double r)> chi;  // n indicator values in {0,1}; empty = all ones
};

/// Space-time field: one (n x N) frame per node of the time grid.
struct RDField {
  RDGrid grid;
  TimeGrid tspan;
  std::vector<Eigen::MatrixXd> frames;

  const Eigen::MatrixXd& frame(int k) const { return frames[k]; }
  /// Linear interpolation in time.
  Eigen::MatrixXd at(double t) const;
};

using ControlField = std::function<void(double t, Eigen::MatrixXd& u)>;  // fills p x N

/// Second-order central Laplacian of each row (periodic wrap or ghost-node
/// Neumann).
void laplacian(const Eigen::MatrixXd& field, const RDGrid& grid, Eigen::MatrixXd& out);

/// Method of lines with RK4 in time. Throws StabilityViolated when
/// dt > 0.4 dx^2 / max(D). Pass an empty ControlField for the uncontrolled
/// system. `store_every` keeps every k-th frame (frame times stay on the
/// integration grid).
RDField rd_integrate(const RDSystem& system, const RDGrid& grid, const ControlField& u,
                     const Eigen::MatrixXd& state0, const TimeGrid& tspan, int store_every = 1);

/// Sampled traveling-wave profile with speed c and a clamped cubic
/// interpolant; ends are held at the asymptotic states.
struct WaveProfile {
  Eigen::VectorXd xi;       // sample abscissae, ascending, uniform
  Eigen::MatrixXd values;   // n x samples
  double c = 0.0;

  Eigen::VectorXd at(double s) const;
  Eigen::VectorXd derivative_at(double s) const;
};

struct Protocol {
  std::function<double(double)> phi;
  std::function<double(double)> phidot;
};

/// Sinusoidal protocol phi = A0 + A sin(2 pi t / T + A1) with the smooth
/// start phi(t0) = phi0, phidot(t0) = c.
Protocol sinusoidal_protocol_smooth_start(double A, double T, double phi0, double c, double t0);

/// Analytic bistable front of the cubic kinetics -k(x-x0)(x-x1)(x-x2) and
/// its speed c = sqrt(D k / 2) (x0 + x2 - 2 x1).
WaveProfile schloegl_front(double k, double x0, double x1, double x2, double D,
                           double xi_half_width = 40.0, int samples = 4001);

struct FhnWaveOptions {
  double seed_width = 10.0;
  double seed_height = 2.0;
  double settle_time = 400.0;
  double shape_tol = 1e-6;  // relative change of integral shape invariants
};

/// FHN reaction-diffusion system with activator kinetics 3y - y^3 - x and
/// activator-only actuation; params: a0, a1, a2, Dx, Dy.
RDSystem fhn_rds_system(const ParamMap& params);

/// Pulse profile of the FHN reaction-diffusion model, extracted from a long
/// simulation once the shape is stationary in the comoving frame; speed from
/// a linear fit of position over time.
WaveProfile fhn_wave_profile(const ParamMap& params, const RDGrid& grid,
                             const FhnWaveOptions& opts = {});

enum class PositionRecipe { SchloeglMultiplicative, FhnActivator };

struct PositionControl {
  RDField u;      // p x N control frames
  RDField x_hat;  // auxiliary drive of the fhn recipe (1 x N), empty otherwise
};

/// Control field realizing the shifted-profile distribution under the given
/// protocol of motion.
PositionControl position_control_signal(const RDSystem& system, const WaveProfile& profile,
                                        const Protocol& protocol, PositionRecipe recipe,
                                        const RDGrid& grid, const TimeGrid& tspan);

enum class PositionMethod { SteepestSlope, Max };

/// Argmax of |d_r x| (or of x) refined by a 3-point parabolic fit.
double measure_position(const Eigen::VectorXd& snapshot, const RDGrid& grid,
                        PositionMethod method);

/// Unwraps a periodic position measurement against the previous one.
double unwrap_position(double previous, double measured, double L);

/// Generic exactly-realizable-distribution control:
/// u = B+(x_d, r) (d_t x_d - D lap x_d - R(x_d)), vanishing where chi = 0.
RDField rds_synthesize_control(const RDSystem& system, const RDField& x_d);

}  // namespace act
