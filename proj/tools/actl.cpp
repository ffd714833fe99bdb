// Scenario runner for the affine-control toolkit: parses a key = value
// config, dispatches to the library, writes CSV artifacts, prints a summary.
#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <vector>

#include "act/asymptotics.hpp"
#include "act/config.hpp"
#include "act/controllability.hpp"
#include "act/csv.hpp"
#include "act/errors.hpp"
#include "act/expression.hpp"
#include "act/optimal.hpp"
#include "act/realize.hpp"
#include "act/rds.hpp"

namespace {

using namespace act;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitConfig = 3;

struct GlobalFlags {
  std::string config_path;
  std::string out_dir = ".";
  unsigned long long seed = 0;
  double tol = 1e-9;
};

std::string out_path(const GlobalFlags& flags, const std::string& name) {
  std::filesystem::create_directories(flags.out_dir);
  return (std::filesystem::path(flags.out_dir) / name).string();
}

// Component aliases accepted in [desired] / [initial] / [terminal].
std::vector<std::string> component_names(int n, const std::string& system) {
  if (system == "sir") return {"S", "I", "R"};
  if (n == 2) return {"x", "y"};
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

int component_index(const std::string& key, const std::vector<std::string>& names) {
  for (size_t i = 0; i < names.size(); ++i)
    if (key == names[i] || key == "x" + std::to_string(i + 1)) return static_cast<int>(i);
  return -1;
}

ParamMap parameter_overrides(const Config& cfg) {
  ParamMap overrides;
  for (const auto& [key, value] : cfg.section("system")) {
    if (key.rfind("param.", 0) == 0) overrides[key.substr(6)] = std::stod(value);
  }
  return overrides;
}

TimeGrid grid_from(const Config& cfg, const std::string& section = "grid") {
  return TimeGrid(cfg.get_number(section + ".t0"), cfg.get_number(section + ".t1"),
                  cfg.get_int(section + ".steps"));
}

Eigen::VectorXd initial_state(const Config& cfg, int n,
                              const std::vector<std::string>& names) {
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);
  for (const auto& [key, value] : cfg.section("initial")) {
    const int idx = component_index(key, names);
    if (idx < 0) throw ConfigError("unknown state component 'initial." + key + "'");
    x0[idx] = std::stod(value);
  }
  return x0;
}

std::vector<std::string> csv_header(const std::string& prefix, int count) {
  std::vector<std::string> h;
  for (int i = 1; i <= count; ++i) h.push_back(prefix + std::to_string(i));
  return h;
}

int run_realize(const Config& cfg, const GlobalFlags& flags) {
  const std::string name = cfg.get_string("system.name");
  const AffineSystem sys = builtin_system(name, parameter_overrides(cfg));
  const TimeGrid grid = grid_from(cfg);
  const auto names = component_names(sys.n, name);

  DesiredTrajectory desired(sys.n);
  for (const auto& [key, value] : cfg.section("desired")) {
    const int idx = component_index(key, names);
    if (idx < 0) throw ConfigError("unknown state component 'desired." + key + "'");
    const Expression expr = parse_expression(value);
    const Expression dexpr = expr.derivative();
    desired.set(idx, [expr](double t) { return expr.eval(t); },
                [dexpr](double t) { return dexpr.eval(t); });
  }
  const Eigen::VectorXd x0 = initial_state(cfg, sys.n, names);

  const RealizationResult res = solve_constraint(sys, desired, x0, grid);
  const DeviationReport rep = verify_tracking(sys, res.u, x0, grid, res.x_d);

  std::vector<std::string> header{"t"};
  for (const auto& nm : names) header.push_back(nm + "_d");
  for (const auto& h : csv_header("u", sys.p)) header.push_back(h);
  header.push_back("residual");
  Eigen::MatrixXd table(grid.size(), header.size());
  table.col(0) = grid.times();
  table.middleCols(1, sys.n) = res.x_d.values.transpose();
  table.middleCols(1 + sys.n, sys.p) = res.u.values.transpose();
  table.col(1 + sys.n + sys.p).setConstant(res.residual);
  write_csv(out_path(flags, "realize.csv"), header, table);

  std::printf("residual=%g tracking_sup=%g clipped=%s\n", res.residual, rep.sup,
              res.control_clipped ? "true" : "false");
  return kExitOk;
}

int run_controllability(const Config& cfg, const GlobalFlags& flags) {
  const std::string name = cfg.get_string("system.name");
  const AffineSystem sys = builtin_system(name, parameter_overrides(cfg));
  const std::string variant = cfg.maybe_string("controllability.variant")
                                  .value_or(satisfies_linearizing_assumption(sys)
                                                ? "realizable"
                                                : "kalman");

  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd B;
  if (variant == "kalman") {
    const Eigen::VectorXd probe = Eigen::VectorXd::Constant(sys.n, 0.37);
    A = sys.gradR(probe);
    B = sys.B(probe);
  } else {
    linear_constraint_part(sys, A, b);
    B = sys.B(Eigen::VectorXd::Constant(sys.n, 0.37));
  }

  ControllabilityReport rep;
  if (variant == "kalman") {
    rep = kalman_matrix(A, B);
  } else if (variant == "realizable") {
    rep = realizable_controllability_matrix(A, B);
  } else if (variant == "output-classic" || variant == "output-realizable") {
    const std::string crow = cfg.get_string("controllability.C");
    std::stringstream ss(crow);
    std::vector<double> entries;
    double v;
    while (ss >> v) entries.push_back(v);
    if (entries.empty() || entries.size() % sys.n != 0)
      throw ConfigError("controllability.C must hold m x n entries row-major");
    Eigen::MatrixXd C(entries.size() / sys.n, sys.n);
    for (size_t i = 0; i < entries.size(); ++i)
      C(i / sys.n, i % sys.n) = entries[i];
    rep = output_controllability_matrix(A, B, C,
                                        variant == "output-classic"
                                            ? OutputVariant::Classic
                                            : OutputVariant::Realizable);
  } else {
    throw ConfigError("unknown controllability.variant '" + variant + "'");
  }

  std::printf("rank=%d required=%d controllable=%s\n", rep.rank, rep.required_rank,
              rep.controllable ? "true" : "false");
  for (Eigen::Index i = 0; i < rep.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < rep.matrix.cols(); ++j)
      std::printf("%s%.6g", j ? " " : "", rep.matrix(i, j));
    std::printf("\n");
  }
  (void)flags;
  return kExitOk;
}

int run_optimal(const Config& cfg, const GlobalFlags& flags) {
  const std::string name = cfg.get_string("system.name");
  TrackingProblem pb;
  pb.system = builtin_system(name, parameter_overrides(cfg));
  pb.grid = grid_from(cfg);
  const auto names = component_names(pb.system.n, name);
  const int n = pb.system.n;

  pb.epsilon = cfg.get_number("optimal.epsilon");
  pb.x0 = initial_state(cfg, n, names);
  pb.x_d = Trajectory(pb.grid, n);
  for (const auto& [key, value] : cfg.section("desired")) {
    const int idx = component_index(key, names);
    if (idx < 0) throw ConfigError("unknown state component 'desired." + key + "'");
    const Expression expr = parse_expression(value);
    for (int k = 0; k < pb.grid.size(); ++k)
      pb.x_d.values(idx, k) = expr.eval(pb.grid.time(k));
  }
  pb.S = Eigen::MatrixXd::Identity(n, n);
  pb.S1 = Eigen::MatrixXd::Zero(n, n);
  pb.x1 = Eigen::VectorXd::Zero(n);
  pb.sharp_terminal_mask.assign(n, false);
  for (const auto& [key, value] : cfg.section("terminal")) {
    if (key.rfind("sharp.", 0) == 0) {
      const int idx = component_index(key.substr(6), names);
      if (idx < 0) throw ConfigError("unknown component 'terminal." + key + "'");
      pb.sharp_terminal_mask[idx] = std::stod(value) != 0.0;
    } else if (key.rfind("beta.", 0) == 0) {
      const int idx = component_index(key.substr(5), names);
      if (idx < 0) throw ConfigError("unknown component 'terminal." + key + "'");
      pb.S1(idx, idx) = std::stod(value);
    } else {
      const int idx = component_index(key, names);
      if (idx < 0) throw ConfigError("unknown component 'terminal." + key + "'");
      pb.x1[idx] = std::stod(value);
    }
  }
  for (int i = 0; i < n; ++i)
    if (auto s = cfg.maybe_number("optimal.s" + std::to_string(i + 1))) pb.S(i, i) = *s;

  GradientOptions opts;
  if (auto v = cfg.maybe_number("optimal.max_iter")) opts.max_iter = static_cast<int>(*v);
  if (auto v = cfg.maybe_number("optimal.tol")) opts.tol = *v;
  if (auto v = cfg.maybe_number("optimal.step0")) opts.step0 = *v;

  const OptimalSolution sol = gradient_descent(pb, Trajectory(pb.grid, pb.system.p), opts);

  std::vector<std::string> header{"t"};
  for (const auto& nm : names) header.push_back(nm);
  for (const auto& nm : names) header.push_back("lambda_" + nm);
  for (const auto& h : csv_header("u", pb.system.p)) header.push_back(h);
  Eigen::MatrixXd table(pb.grid.size(), header.size());
  table.col(0) = pb.grid.times();
  table.middleCols(1, n) = sol.x.values.transpose();
  table.middleCols(1 + n, n) = sol.lambda.values.transpose();
  table.middleCols(1 + 2 * n, pb.system.p) = sol.u.values.transpose();
  write_csv(out_path(flags, "optimal.csv"), header, table);

  std::printf("J=%.10g iters=%d residual=%.6g\n", sol.J, sol.iterations,
              sol.stationarity_residual);
  return kExitOk;
}

int run_analytic(const Config& cfg, const GlobalFlags& flags) {
  Problem2D pb;
  const std::string name = cfg.maybe_string("system.name").value_or("fhn-activator");
  const ParamMap par = builtin_parameters(name == "none" ? "fhn-activator" : name,
                                          parameter_overrides(cfg));
  if (name == "fhn-activator") {
    pb.a0 = par.at("a0");
    pb.a1 = par.at("a1");
    pb.a2 = par.at("a2");
    pb.R = [](double x, double y) { return y - y * y * y / 3.0 - x; };
  } else if (name == "mechanical") {
    pb.a0 = 0.0;
    pb.a1 = 0.0;
    pb.a2 = 1.0;
    const double gamma = par.count("gamma") ? par.at("gamma") : 0.1;
    pb.R = [gamma](double x, double y) { return -gamma * y - std::sin(x); };
  } else if (name == "free-particle" || name == "none") {
    pb.a0 = 0.0;
    pb.a1 = 0.0;
    pb.a2 = 1.0;
    pb.R = [](double, double) { return 0.0; };
  } else {
    throw ConfigError("analytic mode supports fhn-activator, mechanical, free-particle");
  }
  const bool bq = par.count("b_quadratic") && par.at("b_quadratic") != 0.0;
  const double b0 = par.count("b0") ? par.at("b0") : 1.0;
  pb.b = bq ? std::function<double(double, double)>(
                  [](double x, double) { return 11.0 / 4.0 + x * x; })
            : std::function<double(double, double)>([b0](double, double) { return b0; });

  pb.grid = grid_from(cfg);
  pb.epsilon = cfg.get_number("analytic.epsilon");
  pb.s1 = cfg.maybe_number("analytic.s1").value_or(1.0);
  pb.s2 = cfg.maybe_number("analytic.s2").value_or(1.0);
  const double beta1 = cfg.get_number("analytic.beta1");
  pb.beta1_infinite = std::isinf(beta1);
  pb.beta1 = pb.beta1_infinite ? 0.0 : beta1;
  pb.x0 = cfg.get_number("initial.x");
  pb.y0 = cfg.get_number("initial.y");
  pb.x1 = cfg.get_number("terminal.x");
  pb.y1 = cfg.get_number("terminal.y");

  const Expression xd = parse_expression(cfg.get_string("desired.x"));
  const Expression yd = parse_expression(cfg.get_string("desired.y"));
  const Expression xdd = xd.derivative();
  const Expression ydd = yd.derivative();
  pb.x_d = [xd](double t) { return xd.eval(t); };
  pb.y_d = [yd](double t) { return yd.eval(t); };
  pb.x_d_dot = [xdd](double t) { return xdd.eval(t); };
  pb.y_d_dot = [ydd](double t) { return ydd.eval(t); };

  const Composite2D comp = composite_solution(pb);
  const Eps0Report eps0 = eps0_limit(pb);

  std::vector<std::string> header{"t", "x", "y", "lambda_x", "u"};
  Eigen::MatrixXd table(pb.grid.size(), 5);
  table.col(0) = pb.grid.times();
  table.middleCols(1, 4) = comp.composite.values.transpose();
  write_csv(out_path(flags, "analytic.csv"), header, table);

  std::printf("y_init=%.10g y_end=%.10g kappa=%.10g\n", comp.y_init, comp.y_end, comp.kappa);
  std::printf("jump_left=%.10g kick_left=%.10g jump_right=%.10g kick_right=%.10g\n",
              eps0.jump_left, eps0.kick_left, eps0.jump_right, eps0.kick_right);
  return kExitOk;
}

int run_rds(const Config& cfg, const GlobalFlags& flags) {
  const std::string recipe = cfg.get_string("rds.recipe");
  const double t1 = cfg.get_number("rds.t1");
  const double A = cfg.get_number("rds.amplitude");
  const double period = cfg.get_number("rds.period");
  const int snapshots = static_cast<int>(cfg.maybe_number("rds.snapshots").value_or(10));

  RDSystem sys;
  RDGrid grid;
  WaveProfile profile;
  PositionRecipe kind;
  double phi0 = 0.0;
  PositionMethod method;

  if (recipe == "schloegl") {
    const ParamMap par = builtin_parameters("schloegl-kinetics", parameter_overrides(cfg));
    sys.base = builtin_system("schloegl-kinetics", parameter_overrides(cfg));
    sys.D = Eigen::VectorXd::Constant(1, cfg.maybe_number("rds.D").value_or(1.0));
    grid = RDGrid(cfg.maybe_number("rds.L").value_or(100.0),
                  static_cast<int>(cfg.maybe_number("rds.N").value_or(1000)),
                  BoundaryKind::Neumann);
    profile = schloegl_front(par.at("k"), par.at("x0"), par.at("x1"), par.at("x2"), sys.D[0]);
    kind = PositionRecipe::SchloeglMultiplicative;
    phi0 = cfg.maybe_number("rds.phi0").value_or(0.5 * grid.L);
    method = PositionMethod::SteepestSlope;
  } else if (recipe == "fhn") {
    const ParamMap par = {{"a0", cfg.maybe_number("rds.a0").value_or(0.429)},
                          {"a1", cfg.maybe_number("rds.a1").value_or(0.0)},
                          {"a2", cfg.maybe_number("rds.a2").value_or(0.33)},
                          {"Dx", cfg.maybe_number("rds.Dx").value_or(0.3)},
                          {"Dy", cfg.maybe_number("rds.Dy").value_or(1.0)}};
    sys = fhn_rds_system(par);
    grid = RDGrid(cfg.maybe_number("rds.L").value_or(150.0),
                  static_cast<int>(cfg.maybe_number("rds.N").value_or(1024)),
                  BoundaryKind::Periodic);
    profile = fhn_wave_profile(par, grid);
    kind = PositionRecipe::FhnActivator;
    phi0 = cfg.maybe_number("rds.phi0").value_or(0.5 * grid.L);
    method = PositionMethod::Max;
  } else {
    throw ConfigError("rds.recipe must be schloegl or fhn");
  }

  const double dmax = sys.D.maxCoeff();
  const double dt_max = 0.4 * grid.dx() * grid.dx() / dmax;
  const int steps = static_cast<int>(std::ceil(t1 / (0.9 * dt_max)));
  const TimeGrid tspan(0.0, t1, steps);

  const Protocol proto = sinusoidal_protocol_smooth_start(A, period, phi0, profile.c, 0.0);
  const PositionControl pc =
      position_control_signal(sys, profile, proto, kind, grid, tspan);

  Eigen::MatrixXd state0(sys.base.n, grid.N);
  for (int i = 0; i < grid.N; ++i) state0.col(i) = profile.at(grid.node(i) - phi0);
  auto control = [&](double t, Eigen::MatrixXd& u) { u = pc.u.at(t); };
  const int store_every = std::max(1, steps / std::max(1, snapshots));
  const RDField run = rd_integrate(sys, grid, control, state0, tspan, store_every);

  // Space-time CSV (snapshot-major) plus measured position over time.
  const int comp = sys.base.n == 1 ? 0 : 1;
  std::vector<std::string> header{"t", "r"};
  for (const auto& h : csv_header("x", sys.base.n)) header.push_back(h);
  header.push_back("u1");
  Eigen::MatrixXd table(static_cast<int>(run.frames.size()) * grid.N, header.size());
  Eigen::MatrixXd positions(static_cast<int>(run.frames.size()), 3);
  char buf[64];
  std::vector<std::string> comments;
  std::snprintf(buf, sizeof buf, "# L=%g N=%d dt=%g", grid.L, grid.N, tspan.dt());
  comments.push_back(buf);

  double prev = phi0;
  for (size_t f = 0; f < run.frames.size(); ++f) {
    const double t = tspan.t0 + tspan.dt() * store_every * static_cast<double>(f);
    const Eigen::MatrixXd uframe = pc.u.at(t);
    for (int i = 0; i < grid.N; ++i) {
      const int row = static_cast<int>(f) * grid.N + i;
      table(row, 0) = t;
      table(row, 1) = grid.node(i);
      for (int cidx = 0; cidx < sys.base.n; ++cidx)
        table(row, 2 + cidx) = run.frames[f](cidx, i);
      table(row, 2 + sys.base.n) = uframe(0, i);
    }
    double pos = measure_position(run.frames[f].row(comp).transpose(), grid, method);
    if (grid.bc == BoundaryKind::Periodic) pos = unwrap_position(prev, pos, grid.L);
    prev = pos;
    positions(static_cast<int>(f), 0) = t;
    positions(static_cast<int>(f), 1) = proto.phi(t);
    positions(static_cast<int>(f), 2) = pos;
  }
  write_csv(out_path(flags, "rds_field.csv"), header, table, comments);
  write_csv(out_path(flags, "rds_position.csv"), {"t", "phi", "measured"}, positions);

  const double sup_err = (positions.col(1) - positions.col(2)).cwiseAbs().maxCoeff();
  std::printf("c=%.8g position_sup_error=%.6g dx=%.6g\n", profile.c, sup_err, grid.dx());
  return kExitOk;
}

int run_compare(const std::string& a_path, const std::string& b_path, const std::string& norm,
                double tol, const std::vector<std::string>& columns) {
  const CsvTable a = read_csv(a_path);
  const CsvTable b = read_csv(b_path);
  const CompareReport rep =
      compare_csv(a, b, norm == "l2" ? CompareNorm::L2 : CompareNorm::Sup, columns);
  for (size_t i = 0; i < rep.columns.size(); ++i)
    std::printf("%s=%.10g\n", rep.columns[i].c_str(), rep.per_column[i]);
  std::printf("aggregate=%.10g\n", rep.aggregate);
  return rep.aggregate <= tol ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine control toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "scenario config file");
  app.add_option("--out", flags.out_dir, "output directory");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--tol", flags.tol, "comparison tolerance");

  auto* realize = app.add_subcommand("realize", "solve the constraint equation and synthesize");
  auto* ctrb = app.add_subcommand("controllability", "rank tests");
  auto* optimal = app.add_subcommand("optimal", "gradient solution of tracking");
  auto* analytic = app.add_subcommand("analytic", "composite small-penalty solution");
  auto* rds = app.add_subcommand("rds", "traveling-wave position control");
  auto* compare = app.add_subcommand("compare", "CSV comparison");
  std::string cmp_a, cmp_b, cmp_norm = "sup";
  std::vector<std::string> cmp_columns;
  compare->add_option("a", cmp_a, "first CSV")->required();
  compare->add_option("b", cmp_b, "second CSV")->required();
  compare->add_option("--norm", cmp_norm, "sup or l2");
  compare->add_option("--columns", cmp_columns, "columns to compare");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (compare->parsed()) return run_compare(cmp_a, cmp_b, cmp_norm, flags.tol, cmp_columns);

    if (flags.config_path.empty()) {
      std::cerr << "error: --config is required for this mode\n";
      return kExitUsage;
    }
    const Config cfg = Config::load(flags.config_path);
    if (realize->parsed()) return run_realize(cfg, flags);
    if (ctrb->parsed()) return run_controllability(cfg, flags);
    if (optimal->parsed()) return run_optimal(cfg, flags);
    if (analytic->parsed()) return run_analytic(cfg, flags);
    if (rds->parsed()) return run_rds(cfg, flags);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SyntaxError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownIdentifier& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
