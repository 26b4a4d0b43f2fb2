#pragma once

#include "zeroform/state_space.hpp"

namespace zeroform {

/// Orthonormal basis of range(U) intersected with range(W) (same ambient dimension).
Eigen::MatrixXd subspace_intersection(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w,
                                      const RankTolerance& tol = {});

/**
 * Maximal (A, im B)-controlled invariant subspace contained in ker C:
 * descending fixed point of V_{k+1} = ker C  intersect  A^-1(V_k + im B),
 * starting from V_0 = ker C. Bases are orthonormal columns; empty is valid.
 */
Eigen::MatrixXd mainco(const Eigen::MatrixXd& a, const Eigen::MatrixXd& im_b,
                       const Eigen::MatrixXd& ker_c, const RankTolerance& tol = {});

/**
 * Minimal conditioned invariant subspace reaching from the origin:
 * ascending fixed point of S_{k+1} = A (S_k intersect ker C) + im B,
 * starting from S_0 = im B intersect ker C.
 */
Eigen::MatrixXd miinco(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ker_c,
                       const Eigen::MatrixXd& im_b, const RankTolerance& tol = {});

/// Full set of subspaces produced by the geometric zero computation.
struct GeometricSubspaces {
    Eigen::MatrixXd kerC;
    Eigen::MatrixXd imB;
    Eigen::MatrixXd Vstar;
    Eigen::MatrixXd Sstar;
    Eigen::MatrixXd Rstar;
    Eigen::MatrixXd V1;
    Eigen::MatrixXd X22;
};

GeometricSubspaces geometric_subspaces(const StateSpace& sys, const RankTolerance& tol = {});

/**
 * Invariant zeros by the geometric route: eigenvalues of the map induced on
 * Vstar / Rstar. Requires D = 0; nonsquare inputs are handled because the
 * geometry never inverts the input-output count.
 */
ZeroMultiset gazero_zeros(const StateSpace& sys, const RankTolerance& tol = {});

}  // namespace zeroform
