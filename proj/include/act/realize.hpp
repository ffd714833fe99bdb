#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "act/affine_system.hpp"
#include "act/time_grid.hpp"

namespace act {

struct RealizationResult {
  Trajectory x_d;           // all n components, constraint-solved where not prescribed
  Trajectory u;             // p components
  double residual = 0.0;    // max over grid of |Q(x_d)(xdot_d - R(x_d))|
  bool control_clipped = false;
};

enum class ConstraintPath { Auto, Linear, Rk4 };

/// Integrates the unprescribed components from Q(xdot_d - R(x_d)) = 0 with
/// initial data taken from x0. Uses the linear closed form when the system
/// satisfies the linearizing assumption, otherwise RK4 on the reduced ODE.
RealizationResult solve_constraint(const AffineSystem& sys, const DesiredTrajectory& desired,
                                   const Eigen::VectorXd& x0, const TimeGrid& grid,
                                   ConstraintPath path = ConstraintPath::Auto);

/// u(t) = B+(x_d(t)) (xdot_d(t) - R(x_d(t))) per grid node.
Trajectory synthesize_control(const AffineSystem& sys, const Trajectory& x_d);

struct DeviationReport {
  Eigen::VectorXd sup_per_component;
  Eigen::VectorXd final_error;
  double sup = 0.0;
  Trajectory x;  // simulated closed-loop trajectory
};

/// Simulates xdot = R(x) + B(x) u(t) (u linearly interpolated between nodes)
/// and reports the deviation from x_d.
DeviationReport verify_tracking(const AffineSystem& sys, const Trajectory& u,
                                const Eigen::VectorXd& x0, const TimeGrid& grid,
                                const Trajectory& x_d);

/// Linear-stability matrices M(t_k) = gradR(x_d) + T(x_d) of the deviation
/// dynamics around an exactly realizable trajectory.
std::vector<Eigen::MatrixXd> stability_matrix(const AffineSystem& sys, const Trajectory& x_d);

enum class OutputRecipe { FhnMixedOutput, SirInfected, FhnActivatorOutput };

struct ScalarSignal {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;  // only FhnActivatorOutput needs it
};

/// Worked output-realization recipes: full x_d and u expressed solely through
/// the scalar desired output z_d and initial data. For SirInfected, omit
/// `z_d` entirely to use the designed parabola (smooth control start,
/// z_d(t1) = 0), with clipping u >= -beta flagged in the result.
RealizationResult realize_output(OutputRecipe recipe, const ParamMap& params,
                                 const std::optional<ScalarSignal>& z_d, const Eigen::VectorXd& x0,
                                 const TimeGrid& grid);

}  // namespace act
