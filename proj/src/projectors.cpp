#include "act/projectors.hpp"

#include <Eigen/SVD>

#include "act/errors.hpp"

namespace act {

ProjectorPair pseudo_inverse_projectors(const Eigen::MatrixXd& B, double tol) {
  const int n = static_cast<int>(B.rows());
  const int p = static_cast<int>(B.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B);
  const auto& sv = svd.singularValues();
  if (p == 0 || sv[0] == 0.0 || sv[p - 1] < tol * sv[0])
    throw RankDeficient("pseudo_inverse_projectors: coupling matrix is rank deficient");

  ProjectorPair out;
  const Eigen::MatrixXd gram = B.transpose() * B;  // p x p, SPD for full column rank
  out.Bplus = gram.ldlt().solve(B.transpose());
  out.P = B * out.Bplus;
  out.Q = Eigen::MatrixXd::Identity(n, n) - out.P;
  return out;
}

WeightedProjectorPair weighted_inverse(const Eigen::MatrixXd& B, const Eigen::MatrixXd& S) {
  const int n = static_cast<int>(B.rows());
  const Eigen::MatrixXd BtSB = B.transpose() * S * B;
  const Eigen::MatrixXd sym = 0.5 * (BtSB + BtSB.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("weighted_inverse: B^T S B is not positive definite");

  WeightedProjectorPair out;
  out.S = S;
  out.Bg = llt.solve(B.transpose() * S);
  out.PS = B * out.Bg;
  out.QS = Eigen::MatrixXd::Identity(n, n) - out.PS;
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(BtSB.rows(), BtSB.cols()));
  out.OmegaS = B * inv * B.transpose();
  out.GammaS = S * B * inv * inv * B.transpose() * S;
  return out;
}

int matrix_rank(const Eigen::MatrixXd& M, double tol) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return rank;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> diagonalize_projector(const Eigen::MatrixXd& B,
                                                                  double tol) {
  const int n = static_cast<int>(B.rows());
  const int p = static_cast<int>(B.cols());
  const ProjectorPair pr = pseudo_inverse_projectors(B, tol);

  // Columns of Q are eigenvectors of Q to eigenvalue one; pick the n-p most
  // independent ones by column-pivoted QR.
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(pr.Q);
  const auto perm = qr.colsPermutation().indices();

  Eigen::MatrixXd T(n, n);
  T.leftCols(p) = B;
  for (int j = 0; j < n - p; ++j) T.col(p + j) = pr.Q.col(perm[j]);

  if (matrix_rank(T, tol) < n)
    throw RankDeficient("diagonalize_projector: basis assembly failed");

  Eigen::MatrixXd QD = T.partialPivLu().solve(pr.Q * T);
  Eigen::MatrixXd pattern = Eigen::MatrixXd::Zero(n, n);
  for (int i = p; i < n; ++i) pattern(i, i) = 1.0;
  if ((QD - pattern).cwiseAbs().maxCoeff() > 1e-8)
    throw RankDeficient("diagonalize_projector: transformed projector is not diagonal");
  return {T, pattern};
}

}  // namespace act
