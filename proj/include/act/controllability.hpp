#pragma once

#include <Eigen/Dense>

#include "act/projectors.hpp"

namespace act {

struct ControllabilityReport {
  Eigen::MatrixXd matrix;
  int rank = 0;
  int required_rank = 0;
  bool controllable = false;
};

/// Kalman block matrix K = [B | AB | ... | A^{n-1}B]; full row rank n means
/// state controllable.
ControllabilityReport kalman_matrix(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                    double tol = kDefaultRankTol);

/// Block matrix for exactly realizable trajectories,
/// Ktilde = [QAP | QAQ*QAP | ... | (QAQ)^{n-1} QAP]; rank n-p means every
/// state transfer is reachable along a realizable trajectory.
ControllabilityReport realizable_controllability_matrix(const Eigen::MatrixXd& A,
                                                        const Eigen::MatrixXd& B,
                                                        double tol = kDefaultRankTol);

enum class OutputVariant { Classic, Realizable };

/// Classic: KC = [CB | CAB | ... | CA^{n-1}B]. Realizable:
/// KtildeC = [CP | CQAP | ... | C(QAQ)^{n-1} QAP]. Required rank is m in
/// both variants.
ControllabilityReport output_controllability_matrix(const Eigen::MatrixXd& A,
                                                     const Eigen::MatrixXd& B,
                                                     const Eigen::MatrixXd& C, OutputVariant which,
                                                     double tol = kDefaultRankTol);

}  // namespace act
