#pragma once

#include <optional>

#include "zeroform/state_space.hpp"

namespace zeroform {

/**
 * The state transformation T = [Bz; Cbar] and its inverse S.
 *
 * Bbar annihilates B from the left, Cbar stacks C_i, C_i A, ...,
 * C_i A^(rho_i - 1) per output, and Bz holds l_eta = l_x - rho rows drawn
 * from the row space of Bbar so that T is invertible.
 */
struct TransformationBundle {
    Eigen::MatrixXd Bbar;
    Eigen::MatrixXd Cbar;
    Eigen::MatrixXd Bz;
    Eigen::MatrixXd T;
    Eigen::MatrixXd S;
    double condition_T = 0.0;
};

/// Worst-case deviations from the expected sparse structure of the form.
struct StructureResiduals {
    double b_top = 0.0;         // top l_eta rows of T B
    double c_left = 0.0;        // first l_eta columns of C S
    double c_xi_pattern = 0.0;  // C_xi vs the unit-coordinate pattern
    double a_xieta_rows = 0.0;  // leading rows of each output block of A_xieta
    double a_xi_rows = 0.0;     // leading rows of each output block vs the shift pattern

    double max() const;
};

/**
 * Realization (T A S, T B, C S) partitioned so that the invariant zeros of a
 * square strictly proper system are the eigenvalues of A_eta.
 */
struct InvariantZeroForm {
    Eigen::MatrixXd A_eta;    // l_eta x l_eta
    Eigen::MatrixXd A_etaxi;  // l_eta x rho
    Eigen::MatrixXd A_xieta;  // rho x l_eta
    Eigen::MatrixXd A_xi;     // rho x rho
    Eigen::MatrixXd B_xi;     // rho x l_u
    Eigen::MatrixXd C_xi;     // l_y x rho
    TransformationBundle bundle;
    RelativeDegreeProfile rho;
    StructureResiduals residuals;
    double structure_tolerance = 0.0;
    bool b_xi_full_column_rank = false;

    Index l_eta() const { return A_eta.rows(); }
};

/**
 * Builds the transformation bundle for a strictly proper system with all
 * relative degrees >= 1.
 *
 * Bz is selected from an orthonormal row basis of Bbar by maximizing the
 * component outside the row space of Cbar (SVD of the projected basis), with
 * a pivoted greedy row selection as fallback. `forced_bz` substitutes an
 * explicit choice, checked only for annihilation of B and invertibility of T.
 *
 * Throws DecompositionNotApplicableError with the rank bookkeeping
 * (rank Bbar + rank Chat - overlap) when no invertible T exists.
 */
TransformationBundle build_transformation(const StateSpace& sys, const RelativeDegreeProfile& rho,
                                          const RankTolerance& tol = {},
                                          const std::optional<Eigen::MatrixXd>& forced_bz = {});

/// Applies the bundle and checks the sparse structure of the result.
InvariantZeroForm decompose(const StateSpace& sys, const TransformationBundle& bundle,
                            const RelativeDegreeProfile& rho, const RankTolerance& tol = {});

/// Convenience: relative degree + transformation + decomposition in one call.
InvariantZeroForm decompose(const StateSpace& sys, const RankTolerance& tol = {},
                            const std::optional<Eigen::MatrixXd>& forced_bz = {});

/**
 * Invariant zeros of a square strictly proper system as eigenvalues of A_eta,
 * each cross-checked against the Rosenbrock pencil of the input system.
 */
ZeroMultiset invariant_zeros_izform(const StateSpace& sys, const RankTolerance& tol = {});

}  // namespace zeroform
