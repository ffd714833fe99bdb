#include "act/rds.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "act/errors.hpp"
#include "act/projectors.hpp"

namespace act {

RDGrid::RDGrid(double L_, int N_, BoundaryKind bc_) : L(L_), N(N_), bc(bc_) {
  if (N < 16) throw BadParameter("RDGrid: need at least 16 points");
  if (!(L > 0.0)) throw BadParameter("RDGrid: domain length must be positive");
}

Eigen::MatrixXd RDField::at(double t) const {
  const double dt = tspan.dt() * ((tspan.size() - 1) / std::max<size_t>(1, frames.size() - 1));
  double s = (t - tspan.t0) / dt;
  const int last = static_cast<int>(frames.size()) - 1;
  if (s <= 0.0) return frames.front();
  if (s >= last) return frames.back();
  const int k = static_cast<int>(s);
  const double w = s - k;
  return (1.0 - w) * frames[k] + w * frames[k + 1];
}

void laplacian(const Eigen::MatrixXd& field, const RDGrid& grid, Eigen::MatrixXd& out) {
  const int N = grid.N;
  const double inv = 1.0 / (grid.dx() * grid.dx());
  out.resize(field.rows(), N);
  out.middleCols(1, N - 2) = (field.leftCols(N - 2) + field.rightCols(N - 2) -
                              2.0 * field.middleCols(1, N - 2)) *
                             inv;
  if (grid.bc == BoundaryKind::Periodic) {
    out.col(0) = (field.col(N - 1) + field.col(1) - 2.0 * field.col(0)) * inv;
    out.col(N - 1) = (field.col(N - 2) + field.col(0) - 2.0 * field.col(N - 1)) * inv;
  } else {
    // Ghost nodes mirror the wall neighbours: zero discrete flux.
    out.col(0) = 2.0 * (field.col(1) - field.col(0)) * inv;
    out.col(N - 1) = 2.0 * (field.col(N - 2) - field.col(N - 1)) * inv;
  }
}

RDField rd_integrate(const RDSystem& system, const RDGrid& grid, const ControlField& u,
                     const Eigen::MatrixXd& state0, const TimeGrid& tspan, int store_every) {
  const int n = system.base.n, p = system.base.p, N = grid.N;
  const double dmax = system.D.maxCoeff();
  if (dmax > 0.0 && tspan.dt() > 0.4 * grid.dx() * grid.dx() / dmax)
    throw StabilityViolated("rd_integrate: dt exceeds 0.4 dx^2 / max(D)");

  Eigen::MatrixXd chi;
  if (system.chi) {
    chi.resize(n, N);
    for (int i = 0; i < N; ++i) chi.col(i) = system.chi(grid.node(i));
  }

  Eigen::MatrixXd lap(n, N), uframe(p, N), Bx(n, p);
  Eigen::VectorXd xi(n), Ri(n);
  auto rhs = [&](double t, const Eigen::MatrixXd& x, Eigen::MatrixXd& dx) {
    laplacian(x, grid, dx);
    for (int i = 0; i < N; ++i) dx.col(i) = system.D.cwiseProduct(dx.col(i));
    for (int i = 0; i < N; ++i) {
      xi = x.col(i);
      system.base.R_into(xi, Ri);
      dx.col(i) += Ri;
    }
    if (u) {
      u(t, uframe);
      for (int i = 0; i < N; ++i) {
        xi = x.col(i);
        system.base.B_into(xi, Bx);
        Eigen::VectorXd force = Bx * uframe.col(i);
        if (chi.size()) force = chi.col(i).cwiseProduct(force);
        dx.col(i) += force;
      }
    }
  };

  RDField out;
  out.grid = grid;
  out.tspan = tspan;
  out.frames.reserve(tspan.size() / store_every + 2);

  Eigen::MatrixXd x = state0, k1(n, N), k2(n, N), k3(n, N), k4(n, N), tmp(n, N);
  out.frames.push_back(x);
  const double h = tspan.dt();
  for (int k = 0; k < tspan.steps; ++k) {
    const double t = tspan.time(k);
    rhs(t, x, k1);
    tmp = x + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = x + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = x + h * k3;
    rhs(t + h, tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) throw NonFinite("rd_integrate: field became non-finite");
    if ((k + 1) % store_every == 0 || k + 1 == tspan.steps) out.frames.push_back(x);
  }
  return out;
}

namespace {

// Cubic Hermite interpolation on the uniform sample grid with 4th-order
// finite-difference slopes; clamped to the end states outside the range.
void hermite_eval(const Eigen::VectorXd& xi, const Eigen::MatrixXd& vals, double s, bool deriv,
                  Eigen::VectorXd& out) {
  const int m = static_cast<int>(xi.size());
  const double h = xi[1] - xi[0];
  out.resize(vals.rows());
  if (s <= xi[0] || s >= xi[m - 1]) {
    out = s <= xi[0] ? vals.col(0) : vals.col(m - 1);
    if (deriv) out.setZero();
    return;
  }
  const double pos = (s - xi[0]) / h;
  int k = std::min(m - 2, static_cast<int>(pos));
  const double w = pos - k;

  auto slope = [&](int i) -> Eigen::VectorXd {
    if (i >= 2 && i <= m - 3)
      return (-vals.col(i + 2) + 8.0 * vals.col(i + 1) - 8.0 * vals.col(i - 1) +
              vals.col(i - 2)) /
             (12.0 * h);
    if (i == 0) return (vals.col(1) - vals.col(0)) / h;
    if (i == m - 1) return (vals.col(m - 1) - vals.col(m - 2)) / h;
    return (vals.col(i + 1) - vals.col(i - 1)) / (2.0 * h);
  };
  const Eigen::VectorXd m0 = slope(k) * h, m1 = slope(k + 1) * h;
  const double w2 = w * w, w3 = w2 * w;
  if (!deriv) {
    out = (2 * w3 - 3 * w2 + 1) * vals.col(k) + (w3 - 2 * w2 + w) * m0 +
          (-2 * w3 + 3 * w2) * vals.col(k + 1) + (w3 - w2) * m1;
  } else {
    out = ((6 * w2 - 6 * w) * vals.col(k) + (3 * w2 - 4 * w + 1) * m0 +
           (-6 * w2 + 6 * w) * vals.col(k + 1) + (3 * w2 - 2 * w) * m1) /
          h;
  }
}

}  // namespace

Eigen::VectorXd WaveProfile::at(double s) const {
  Eigen::VectorXd out;
  hermite_eval(xi, values, s, false, out);
  return out;
}

Eigen::VectorXd WaveProfile::derivative_at(double s) const {
  Eigen::VectorXd out;
  hermite_eval(xi, values, s, true, out);
  return out;
}

Protocol sinusoidal_protocol_smooth_start(double A, double T, double phi0, double c, double t0) {
  const double omega = 2.0 * M_PI / T;
  const double cosA1 = c / (A * omega);
  if (std::abs(cosA1) > 1.0)
    throw BadParameter("sinusoidal_protocol_smooth_start: amplitude too small for the speed");
  const double A1 = std::acos(cosA1);
  const double A0 = phi0 - A * std::sin(A1);
  Protocol p;
  p.phi = [=](double t) { return A0 + A * std::sin(omega * (t - t0) + A1); };
  p.phidot = [=](double t) { return A * omega * std::cos(omega * (t - t0) + A1); };
  return p;
}

WaveProfile schloegl_front(double k, double x0, double x1, double x2, double D,
                           double xi_half_width, int samples) {
  if (!(0.0 < x0 && x0 < x1 && x1 < x2) || k <= 0.0 || D <= 0.0)
    throw BadParameter("schloegl_front: need 0 < x0 < x1 < x2 and positive k, D");
  WaveProfile wp;
  wp.c = std::sqrt(D * k / 2.0) * (x0 + x2 - 2.0 * x1);
  const double slope = std::sqrt(k / D) * (x2 - x0) / (2.0 * std::sqrt(2.0));
  wp.xi.setLinSpaced(samples, -xi_half_width, xi_half_width);
  wp.values.resize(1, samples);
  for (int i = 0; i < samples; ++i)
    wp.values(0, i) = 0.5 * (x0 + x2) + 0.5 * (x0 - x2) * std::tanh(slope * wp.xi[i]);
  return wp;
}

namespace {

double refine_peak(const Eigen::VectorXd& v, int i, const RDGrid& grid) {
  const int N = grid.N;
  const double vm = v[(i - 1 + N) % N], v0 = v[i], vp = v[(i + 1) % N];
  const double denom = vm - 2.0 * v0 + vp;
  double delta = 0.0;
  if (denom != 0.0) delta = 0.5 * (vm - vp) / denom;
  return grid.node(i) + delta * grid.dx();
}

Eigen::VectorXd abs_gradient(const Eigen::VectorXd& x, const RDGrid& grid) {
  const int N = grid.N;
  Eigen::VectorXd g(N);
  for (int i = 0; i < N; ++i) {
    int im = i - 1, ip = i + 1;
    if (grid.bc == BoundaryKind::Periodic) {
      im = (i - 1 + N) % N;
      ip = (i + 1) % N;
    } else {
      im = std::max(0, im);
      ip = std::min(N - 1, ip);
    }
    g[i] = std::abs((x[ip] - x[im]) / ((ip - im) * grid.dx()));
  }
  return g;
}

}  // namespace

double measure_position(const Eigen::VectorXd& snapshot, const RDGrid& grid,
                        PositionMethod method) {
  const Eigen::VectorXd stat =
      method == PositionMethod::SteepestSlope ? abs_gradient(snapshot, grid) : snapshot;
  int best = 0;
  stat.maxCoeff(&best);

  // Candidates within 1% of the peak must form one contiguous run around
  // the argmax (a plateau); a second separated candidate is ambiguous.
  const double top = stat[best];
  const double cutoff = top - 0.01 * (top - stat.minCoeff());
  const bool periodic = grid.bc == BoundaryKind::Periodic;
  int lo = best, hi = best;
  auto wrap = [&](int i) { return (i % grid.N + grid.N) % grid.N; };
  while (hi - lo + 1 < grid.N && stat[wrap(lo - 1)] >= cutoff && (periodic || lo > 0)) --lo;
  while (hi - lo + 1 < grid.N && stat[wrap(hi + 1)] >= cutoff &&
         (periodic || hi < grid.N - 1))
    ++hi;
  for (int i = 0; i < grid.N; ++i) {
    if (stat[i] < cutoff) continue;
    const bool in_run = periodic ? (wrap(i - lo) <= hi - lo) : (i >= lo && i <= hi);
    if (!in_run)
      throw Ambiguous("measure_position: a second candidate extremum within 1%");
  }
  return refine_peak(stat, best, grid);
}

double unwrap_position(double previous, double measured, double L) {
  double pos = measured;
  while (pos - previous > 0.5 * L) pos -= L;
  while (pos - previous < -0.5 * L) pos += L;
  return pos;
}

RDSystem fhn_rds_system(const ParamMap& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const double a0 = get("a0", 0.429), a1 = get("a1", 0.0), a2 = get("a2", 0.33);
  const double Dx = get("Dx", 0.3), Dy = get("Dy", 1.0);

  RDSystem sys;
  sys.base.n = 2;
  sys.base.p = 1;
  sys.base.name = "fhn-rds";
  sys.base.R_into = [a0, a1, a2](const Eigen::VectorXd& x, Eigen::VectorXd& out) {
    out[0] = a0 + a1 * x[0] + a2 * x[1];
    out[1] = 3.0 * x[1] - x[1] * x[1] * x[1] - x[0];
  };
  sys.base.B_into = [](const Eigen::VectorXd&, Eigen::MatrixXd& out) {
    out(0, 0) = 0.0;
    out(1, 0) = 1.0;
  };
  sys.base.gradR_into = [a1, a2](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
    out(0, 0) = a1;
    out(0, 1) = a2;
    out(1, 0) = -1.0;
    out(1, 1) = 3.0 - 3.0 * x[1] * x[1];
  };
  sys.base.gradB_into = [](const Eigen::VectorXd&, std::vector<Eigen::MatrixXd>& out) {
    out.assign(1, Eigen::MatrixXd::Zero(2, 2));
  };
  sys.D.resize(2);
  sys.D << Dx, Dy;
  return sys;
}

WaveProfile fhn_wave_profile(const ParamMap& params, const RDGrid& grid,
                             const FhnWaveOptions& opts) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  const double a0 = get("a0", 0.429), a1 = get("a1", 0.0), a2 = get("a2", 0.33);
  const double Dx = get("Dx", 0.3), Dy = get("Dy", 1.0);
  if (grid.bc != BoundaryKind::Periodic)
    throw BadParameter("fhn_wave_profile: needs a periodic grid");

  const RDSystem sys = fhn_rds_system(params);

  // Homogeneous steady state from the nullclines.
  double ybar = 0.0;
  if (a1 == 0.0) {
    ybar = -a0 / a2;
  } else {
    // Solve a0 + a1 x + a2 y = 0, x = 3y - y^3 by bisection on y.
    auto g = [&](double y) { return a0 + a1 * (3.0 * y - y * y * y) + a2 * y; };
    double lo = -5.0, hi = 5.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(lo) * g(mid) <= 0.0)
        hi = mid;
      else
        lo = mid;
    }
    ybar = 0.5 * (lo + hi);
  }
  const double xbar = 3.0 * ybar - ybar * ybar * ybar;

  // Rectangular super-threshold activator bump; a refractory inhibitor
  // shadow on its left suppresses the left-running twin so a single pulse
  // survives on the ring.
  Eigen::MatrixXd state0(2, grid.N);
  state0.row(0).setConstant(xbar);
  state0.row(1).setConstant(ybar);
  const double seed_center = 0.25 * grid.L;
  for (int i = 0; i < grid.N; ++i) {
    const double r = grid.node(i);
    if (std::abs(r - seed_center) < 0.5 * opts.seed_width) state0(1, i) = opts.seed_height;
    if (r > seed_center - 0.5 * opts.seed_width - 2.0 * opts.seed_width &&
        r < seed_center - 0.5 * opts.seed_width)
      state0(0, i) = xbar + 2.0;
  }

  const double dt = 0.4 * grid.dx() * grid.dx() / std::max(Dx, Dy) * 0.95;
  const double chunk = 5.0;
  const int chunk_steps = std::max(1, static_cast<int>(std::ceil(chunk / dt)));

  Eigen::MatrixXd x = state0;
  double t = 0.0;
  double cur_pos = 0.0;
  bool have_prev = false;
  std::vector<double> fit_t, fit_pos;

  // Shape change is measured through translation-invariant functionals of
  // the periodic field; ring quadrature of a smooth field is insensitive to
  // the lattice phase of the pulse, unlike any realigned-snapshot
  // comparison.
  auto shape_invariants = [&](const Eigen::MatrixXd& field) {
    Eigen::VectorXd inv(3);
    inv[0] = field.row(0).squaredNorm() / grid.N;
    inv[1] = field.row(1).squaredNorm() / grid.N;
    double grad2 = 0.0;
    for (int i = 0; i < grid.N; ++i) {
      const int ip = (i + 1) % grid.N;
      grad2 += std::pow((field(1, ip) - field(1, i)) / grid.dx(), 2);
    }
    inv[2] = grad2 / grid.N;
    return inv;
  };

  Eigen::VectorXd prev_inv;
  bool settled = false;
  while (t < opts.settle_time) {
    TimeGrid span(t, t + chunk_steps * dt, chunk_steps);
    RDField run = rd_integrate(sys, grid, nullptr, x, span, chunk_steps);
    x = run.frames.back();
    t = span.t1;

    if (x.row(1).maxCoeff() < ybar + 0.5)
      throw NoPulse("fhn_wave_profile: seed decayed to the homogeneous state");

    double raw;
    try {
      raw = measure_position(x.row(1).transpose(), grid, PositionMethod::Max);
    } catch (const Ambiguous&) {
      // Igniting plateau; no single pulse to track yet.
      fit_t.clear();
      fit_pos.clear();
      have_prev = false;
      continue;
    }
    cur_pos = have_prev ? unwrap_position(cur_pos, raw, grid.L) : raw;
    fit_t.push_back(t);
    fit_pos.push_back(cur_pos);

    const Eigen::VectorXd inv = shape_invariants(x);
    if (have_prev) {
      const double change =
          ((inv - prev_inv).cwiseAbs().array() / prev_inv.cwiseAbs().array().max(1.0))
              .maxCoeff();
      if (change < opts.shape_tol && fit_t.size() >= 8) {
        settled = true;
        break;
      }
    }
    prev_inv = inv;
    have_prev = true;
  }
  if (!settled)
    throw NotConverged("fhn_wave_profile: shape not stationary within the settle time");

  // Speed from a linear fit of the unwrapped position over the last half of
  // the samples.
  const size_t half = fit_t.size() / 2;
  double st = 0, sp = 0, stt = 0, stp = 0;
  const size_t cnt = fit_t.size() - half;
  for (size_t i = half; i < fit_t.size(); ++i) {
    st += fit_t[i];
    sp += fit_pos[i];
    stt += fit_t[i] * fit_t[i];
    stp += fit_t[i] * fit_pos[i];
  }
  const double c = (cnt * stp - st * sp) / (cnt * stt - st * st);

  // Final profile: the settled field rolled by a whole number of cells so
  // the samples stay exact field values (the sub-cell remainder moves into
  // the xi offset instead).
  const double pos = measure_position(x.row(1).transpose(), grid, PositionMethod::Max);
  const int i0 = static_cast<int>(std::lround(pos / grid.dx()));
  const double frac = pos - i0 * grid.dx();
  WaveProfile wp;
  wp.c = c;
  wp.xi.resize(grid.N);
  wp.values.resize(2, grid.N);
  for (int i = 0; i < grid.N; ++i) {
    wp.xi[i] = (i - grid.N / 2) * grid.dx() - frac;
    wp.values.col(i) = x.col(((i0 + i - grid.N / 2) % grid.N + grid.N) % grid.N);
  }
  return wp;
}

PositionControl position_control_signal(const RDSystem& system, const WaveProfile& profile,
                                        const Protocol& protocol, PositionRecipe recipe,
                                        const RDGrid& grid, const TimeGrid& tspan) {
  PositionControl out;
  out.u.grid = grid;
  out.u.tspan = tspan;
  out.u.frames.assign(tspan.size(), Eigen::MatrixXd(system.base.p, grid.N));

  if (recipe == PositionRecipe::SchloeglMultiplicative) {
    for (int k = 0; k < tspan.size(); ++k) {
      const double t = tspan.time(k);
      const double shift = protocol.phi(t), rate = profile.c - protocol.phidot(t);
      for (int i = 0; i < grid.N; ++i) {
        const double xi = grid.node(i) - shift;
        const Eigen::VectorXd Xc = profile.at(xi);
        const double bval = system.base.B(Xc)(0, 0);
        if (bval == 0.0)
          throw ZeroCoupling("position_control_signal: coupling vanishes on the profile");
        out.u.frames[k](0, i) = rate * profile.derivative_at(xi)[0] / bval;
      }
    }
    return out;
  }

  // FHN recipe: u = (c - phidot) Y_c'(r - phi) + x_hat with x_hat the
  // solution of the forced linear diffusion equation, integrated by the same
  // method-of-lines scheme with periodic wrap.
  const double a1 = [&] {
    // d (first kinetics component) / dx at a probe state
    Eigen::MatrixXd J(system.base.n, system.base.n);
    system.base.gradR_into(Eigen::VectorXd::Zero(system.base.n), J);
    return J(0, 0);
  }();
  const double Dx = system.D[0];

  out.x_hat.grid = grid;
  out.x_hat.tspan = tspan;
  out.x_hat.frames.assign(tspan.size(), Eigen::MatrixXd::Zero(1, grid.N));

  RDGrid pgrid = grid;
  pgrid.bc = BoundaryKind::Periodic;
  auto forcing = [&](double t, Eigen::MatrixXd& f) {
    const double shift = protocol.phi(t), rate = profile.c - protocol.phidot(t);
    for (int i = 0; i < grid.N; ++i)
      f(0, i) = -rate * profile.derivative_at(grid.node(i) - shift)[0];
  };

  Eigen::MatrixXd xh = Eigen::MatrixXd::Zero(1, grid.N);
  Eigen::MatrixXd k1, k2, k3, k4, tmp, lap(1, grid.N), f(1, grid.N);
  auto rhs = [&](double t, const Eigen::MatrixXd& v, Eigen::MatrixXd& dv) {
    laplacian(v, pgrid, dv);
    dv *= Dx;
    dv += a1 * v;
    forcing(t, f);
    dv += f;
  };
  const double h = tspan.dt();
  for (int k = 0; k < tspan.size(); ++k) {
    out.x_hat.frames[k] = xh;
    if (k == tspan.steps) break;
    const double t = tspan.time(k);
    rhs(t, xh, k1);
    tmp = xh + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = xh + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = xh + h * k3;
    rhs(t + h, tmp, k4);
    xh += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  for (int k = 0; k < tspan.size(); ++k) {
    const double t = tspan.time(k);
    const double shift = protocol.phi(t), rate = profile.c - protocol.phidot(t);
    for (int i = 0; i < grid.N; ++i) {
      const double xi = grid.node(i) - shift;
      out.u.frames[k](0, i) =
          rate * profile.derivative_at(xi)[1] + out.x_hat.frames[k](0, i);
    }
  }
  return out;
}

RDField rds_synthesize_control(const RDSystem& system, const RDField& x_d) {
  const int n = system.base.n, p = system.base.p, N = x_d.grid.N;
  const int frames = static_cast<int>(x_d.frames.size());
  const double dt = (x_d.tspan.t1 - x_d.tspan.t0) / (frames - 1);

  RDField out;
  out.grid = x_d.grid;
  out.tspan = x_d.tspan;
  out.frames.assign(frames, Eigen::MatrixXd::Zero(p, N));

  Eigen::MatrixXd lap(n, N), Bx(n, p);
  for (int k = 0; k < frames; ++k) {
    laplacian(x_d.frames[k], x_d.grid, lap);
    for (int i = 0; i < N; ++i) {
      const Eigen::VectorXd chi =
          system.chi ? system.chi(x_d.grid.node(i)) : Eigen::VectorXd::Ones(n);
      if (chi.cwiseAbs().maxCoeff() == 0.0) continue;  // outside the actuated region

      Eigen::VectorXd xv = x_d.frames[k].col(i);
      Eigen::VectorXd dted(n);
      if (k == 0)
        dted = (x_d.frames[1].col(i) - x_d.frames[0].col(i)) / dt;
      else if (k == frames - 1)
        dted = (x_d.frames[k].col(i) - x_d.frames[k - 1].col(i)) / dt;
      else
        dted = (x_d.frames[k + 1].col(i) - x_d.frames[k - 1].col(i)) / (2.0 * dt);

      system.base.B_into(xv, Bx);
      const Eigen::MatrixXd chiB = chi.asDiagonal() * Bx;
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(chiB, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (svd.singularValues()[p - 1] < 1e-12 * std::max(1e-300, svd.singularValues()[0]))
        throw RankDeficientAtNode("rds_synthesize_control: chi B rank deficient at node " +
                                  std::to_string(i));
      const Eigen::VectorXd mis =
          dted - system.D.cwiseProduct(lap.col(i)) - system.base.R(xv);
      out.frames[k].col(i) = svd.solve(chi.cwiseProduct(mis));
    }
  }
  return out;
}

}  // namespace act
