#include "act/affine_system.hpp"

#include <random>

#include "act/errors.hpp"
#include "act/projectors.hpp"

namespace act {

void fill_fd_jacobians(AffineSystem& sys, double h) {
  if (!sys.gradR_into) {
    auto R = sys.R_into;
    const int n = sys.n;
    sys.gradR_into = [R, n, h](const Eigen::VectorXd& x, Eigen::MatrixXd& out) {
      out.resize(n, n);
      Eigen::VectorXd xp = x, xm = x, fp(n), fm(n);
      for (int j = 0; j < n; ++j) {
        xp[j] = x[j] + h;
        xm[j] = x[j] - h;
        R(xp, fp);
        R(xm, fm);
        out.col(j) = (fp - fm) / (2.0 * h);
        xp[j] = x[j];
        xm[j] = x[j];
      }
    };
  }
  if (!sys.gradB_into) {
    auto B = sys.B_into;
    const int n = sys.n, p = sys.p;
    sys.gradB_into = [B, n, p, h](const Eigen::VectorXd& x, std::vector<Eigen::MatrixXd>& out) {
      out.assign(p, Eigen::MatrixXd(n, n));
      Eigen::VectorXd xp = x, xm = x;
      Eigen::MatrixXd Bp(n, p), Bm(n, p);
      for (int l = 0; l < n; ++l) {
        xp[l] = x[l] + h;
        xm[l] = x[l] - h;
        B(xp, Bp);
        B(xm, Bm);
        for (int j = 0; j < p; ++j) out[j].col(l) = (Bp.col(j) - Bm.col(j)) / (2.0 * h);
        xp[l] = x[l];
        xm[l] = x[l];
      }
    };
  }
}

namespace {

// Probe box for rank / structure checks: [-3,3]^n, 20 points, fixed seed.
std::vector<Eigen::VectorXd> probe_states(int n) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<Eigen::VectorXd> probes;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = dist(rng);
    probes.push_back(x);
  }
  return probes;
}

}  // namespace

bool satisfies_linearizing_assumption(const AffineSystem& sys, double tol) {
  const auto probes = probe_states(sys.n);
  const ProjectorPair ref = pseudo_inverse_projectors(sys.B(probes.front()));
  double scale = 1.0;

  // Constant projectors over the probe box.
  for (const auto& x : probes) {
    const ProjectorPair pr = pseudo_inverse_projectors(sys.B(x));
    if ((pr.Q - ref.Q).cwiseAbs().maxCoeff() > tol) return false;
  }
  // Q R affine: exactness of the two-point secant against a third collinear
  // state catches any curvature.
  for (const auto& x : probes) {
    const Eigen::VectorXd mid = 0.5 * x;
    const Eigen::VectorXd qr0 = ref.Q * sys.R(Eigen::VectorXd::Zero(sys.n));
    const Eigen::VectorXd qr1 = ref.Q * sys.R(x);
    const Eigen::VectorXd qrm = ref.Q * sys.R(mid);
    scale = std::max({scale, qr0.cwiseAbs().maxCoeff(), qr1.cwiseAbs().maxCoeff()});
    if ((qrm - 0.5 * (qr0 + qr1)).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

void linear_constraint_part(const AffineSystem& sys, Eigen::MatrixXd& QA, Eigen::VectorXd& Qb,
                            double tol) {
  const int n = sys.n;
  // B may degenerate at special states (the SIR coupling vanishes at the
  // origin); the projector is state independent here, so any regular probe
  // state serves.
  const ProjectorPair pr = pseudo_inverse_projectors(sys.B(probe_states(n).front()));
  const Eigen::VectorXd R0 = sys.R(Eigen::VectorXd::Zero(n));
  Qb = pr.Q * R0;
  QA.resize(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd ei = Eigen::VectorXd::Unit(n, i);
    QA.col(i) = pr.Q * (sys.R(ei) - R0);
  }
  // The extraction is only meaningful when Q R really is affine.
  double scale = std::max(1.0, QA.cwiseAbs().maxCoeff());
  for (const auto& x : probe_states(n)) {
    const Eigen::VectorXd should = QA * x + Qb;
    const Eigen::VectorXd is = pr.Q * sys.R(x);
    scale = std::max(scale, is.cwiseAbs().maxCoeff());
    if ((should - is).cwiseAbs().maxCoeff() > tol * scale)
      throw BadParameter("linear_constraint_part: Q R(x) is not affine in x for system '" +
                         sys.name + "'");
  }
}

}  // namespace act
