#include "act/controllability.hpp"

#include "act/errors.hpp"

namespace act {

ControllabilityReport kalman_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                    double tol) {
  const int n = static_cast<int>(A.rows());
  const int p = static_cast<int>(B.cols());
  ControllabilityReport rep;
  rep.matrix.resize(n, n * p);
  Eigen::MatrixXd block = B;
  for (int k = 0; k < n; ++k) {
    rep.matrix.middleCols(k * p, p) = block;
    block = A * block;
  }
  rep.rank = matrix_rank(rep.matrix, tol);
  rep.required_rank = n;
  rep.controllable = rep.rank == rep.required_rank;
  return rep;
}

ControllabilityReport realizable_controllability_matrix(const Eigen::MatrixXd& A,
                                                        const Eigen::MatrixXd& B, double tol) {
  const int n = static_cast<int>(A.rows());
  const int p = static_cast<int>(B.cols());
  const ProjectorPair pr = pseudo_inverse_projectors(B, tol);
  const Eigen::MatrixXd QAP = pr.Q * A * pr.P;
  const Eigen::MatrixXd QAQ = pr.Q * A * pr.Q;

  ControllabilityReport rep;
  rep.matrix.resize(n, n * n);
  Eigen::MatrixXd block = QAP;
  for (int k = 0; k < n; ++k) {
    rep.matrix.middleCols(k * n, n) = block;
    block = QAQ * block;
  }
  rep.rank = matrix_rank(rep.matrix, tol);
  rep.required_rank = n - p;
  rep.controllable = rep.rank == rep.required_rank;
  return rep;
}

ControllabilityReport output_controllability_matrix(const Eigen::MatrixXd& A,
                                                     const Eigen::MatrixXd& B,
                                                     const Eigen::MatrixXd& C, OutputVariant which,
                                                     double tol) {
  const int n = static_cast<int>(A.rows());
  const int p = static_cast<int>(B.cols());
  const int m = static_cast<int>(C.rows());
  if (matrix_rank(C, tol) < m)
    throw RankDeficient("output_controllability_matrix: C must have full row rank");

  ControllabilityReport rep;
  if (which == OutputVariant::Classic) {
    rep.matrix.resize(m, n * p);
    Eigen::MatrixXd block = B;
    for (int k = 0; k < n; ++k) {
      rep.matrix.middleCols(k * p, p) = C * block;
      block = A * block;
    }
  } else {
    const ProjectorPair pr = pseudo_inverse_projectors(B, tol);
    const Eigen::MatrixXd QAP = pr.Q * A * pr.P;
    const Eigen::MatrixXd QAQ = pr.Q * A * pr.Q;
    rep.matrix.resize(m, n * (n + 1));
    rep.matrix.leftCols(n) = C * pr.P;
    Eigen::MatrixXd block = QAP;
    for (int k = 0; k < n; ++k) {
      rep.matrix.middleCols((k + 1) * n, n) = C * block;
      block = QAQ * block;
    }
  }
  rep.rank = matrix_rank(rep.matrix, tol);
  rep.required_rank = m;
  rep.controllable = rep.rank == rep.required_rank;
  return rep;
}

}  // namespace act
