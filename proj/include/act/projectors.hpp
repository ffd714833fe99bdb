#pragma once

#include <Eigen/Dense>
#include <utility>

namespace act {

inline constexpr double kDefaultRankTol = 1e-10;

/// Moore-Penrose pseudo-inverse of a full-column-rank coupling matrix
/// together with the complementary orthogonal projectors it induces:
/// P = B B+ projects onto the actuated directions, Q = 1 - P onto the rest.
struct ProjectorPair {
  Eigen::MatrixXd Bplus;  // p x n
  Eigen::MatrixXd P;      // n x n
  Eigen::MatrixXd Q;      // n x n
};

/// Weighted counterpart built from a symmetric weight matrix S. Bg is a
/// generalized reflexive inverse: it satisfies the Moore-Penrose conditions
/// except the symmetry of B*Bg, so PS and QS are idempotent but generally
/// not symmetric.
struct WeightedProjectorPair {
  Eigen::MatrixXd S;
  Eigen::MatrixXd Bg;      // p x n, (B^T S B)^{-1} B^T S
  Eigen::MatrixXd PS;      // n x n
  Eigen::MatrixXd QS;      // n x n
  Eigen::MatrixXd OmegaS;  // n x n, B (B^T S B)^{-1} B^T
  Eigen::MatrixXd GammaS;  // n x n, S B (B^T S B)^{-2} B^T S
};

ProjectorPair pseudo_inverse_projectors(const Eigen::MatrixXd& B, double tol = kDefaultRankTol);

WeightedProjectorPair weighted_inverse(const Eigen::MatrixXd& B, const Eigen::MatrixXd& S);

/// Count of singular values above tol times the largest one; 0 for the zero
/// matrix.
int matrix_rank(const Eigen::MatrixXd& M, double tol = kDefaultRankTol);

/// Basis change T = [columns of B | n-p independent columns of Q] bringing
/// both projectors to diagonal form. T^{-1} Q T = diag(0,...,0,1,...,1) with
/// p zeros first.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> diagonalize_projector(const Eigen::MatrixXd& B,
                                                                  double tol = kDefaultRankTol);

}  // namespace act
